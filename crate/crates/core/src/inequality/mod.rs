mod ball;
mod dimension;
mod extension;
mod hardy;
mod homogeneity;
mod porosity;
mod reverse;
mod sweep;

pub use ball::{BallDecomposition, BallIntegral, BallOptions};
pub use dimension::{
    aikawa_integral, aikawa_integral_with, boundary_probes, box_counting_dimension, estimate_aikawa_dimension, write_dimension_summary,
    AikawaIntegral, DimensionOptions, DimensionReport, DimensionRow, DEFAULT_RATIO_THRESHOLD,
};
pub use hardy::{hardy_functional, CoverNodes, HardyFunctional};
pub use porosity::{porosity_constant, porosity_constant_seeded, required_kappa, KAPPA_GRID};
pub use sweep::{hardy_corpus, hardy_ratio_sweep, HardyReport, HardyRow, HardyTrend, SweepOptions, SweepPoint, CORPUS_SCALES};
pub use homogeneity::{homogeneity_slope, homogeneity_slope_with, HomogeneityOptions, HomogeneityReport};
pub use reverse::{bump_dimension_test, reverse_holder_constant, reverse_holder_cubes, reverse_holder_dist, reverse_holder_family, BumpRow};
pub use extension::{extension_corpus, frame_tail, multiplier_ratio, straddling_corpus, zero_extension_check, ExtensionContext, ExtensionOptions, MultiplierReport, ZeroExtension};
