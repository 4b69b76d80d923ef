//! Local polynomial approximation and the discrete smoothness norms built on it.

mod field;
mod frac;
mod params;
mod poly;
mod tl;

pub use field::{plateau_profile, smooth_step, ScalarField};
pub use frac::{frac_seminorm, FracOptions, FracSeminorm};
pub use params::NormParams;
pub(crate) use params::{de_extended as de_extended_f64, ser_extended as ser_extended_f64};
pub use poly::{
    basis_indices, basis_values, local_approx_error, min_order, project_polynomial, project_values, residual_norm,
    LocalPolynomial,
};
pub use tl::{default_j_min, tl_norm, TlNorm, TlRegion, MAX_TL_LEVEL};
