use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ball::slope;
use super::hardy::CoverNodes;
use crate::approx::{default_j_min, frac_seminorm, tl_norm, FracOptions, NormParams, ScalarField, TlRegion};
use crate::dyadic::{whitney_cover, Frame};
use crate::geometry::{Domain, Point, SetOracle};
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Bump radii of the corpus, as fractions of the frame side.
pub const CORPUS_SCALES: [f64; 3] = [0.25, 0.125, 0.0625];

/// Radial plateau bumps at three scales and five centres per scale (two on
/// ∂G, two near it, one off it) plus both coordinate functions cut off by a
/// window bump. Deterministic in `seed`.
pub fn hardy_corpus(domain: &Domain, seed: u64) -> Vec<ScalarField> {
    let frame = Frame::for_domain(domain);
    let bb = domain.bounding_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &scale in &CORPUS_SCALES {
        let radius = scale * frame.side;
        for offset in [0.0, 0.0, 0.25, 0.25, 0.75] {
            let probe = Point::new(bb.min.x + rng.gen::<f64>() * bb.width(), bb.min.y + rng.gen::<f64>() * bb.height());
            let base = domain.nearest(probe);
            let angle = rng.gen::<f64>() * std::f64::consts::TAU;
            let center = Point::new(base.x + offset * radius * angle.cos(), base.y + offset * radius * angle.sin());
            out.push(ScalarField::Bump { center, radius, amplitude: 1.0 });
        }
    }
    let window = ScalarField::Bump { center: frame.root_box().center(), radius: 0.5 * frame.side, amplitude: 1.0 };
    for axis in 0..2 {
        out.push(ScalarField::Product { factors: vec![ScalarField::Coordinate { axis }, window.clone()] });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyRow {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub j_max: u32,
    pub corpus_id: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Refinement trend of one grid point.
#[derive(Clone, Debug, Serialize)]
pub struct HardyTrend {
    pub point: SweepPoint,
    /// sup ratio per j_max, in the order of the report's j_max list.
    pub sup_ratio: Vec<f64>,
    /// Largest sup ratio growth between successive resolutions.
    pub max_step_growth: f64,
    /// sup ratio at the finest over the coarsest resolution.
    pub total_growth: f64,
    /// Fitted log2 growth rate of the per-level lhs^p increments, from one
    /// level above the coarsest j_max to the finest plus `trend_extra`.
    pub increment_exponent: f64,
    pub divergent_by_factor: bool,
    pub divergent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyReport {
    pub grid: Vec<SweepPoint>,
    pub j_max: Vec<u32>,
    /// Resolution of the Whitney cover (or TL grid) used on the right side.
    pub rhs_level: u32,
    pub rows: Vec<HardyRow>,
    pub trends: Vec<HardyTrend>,
}

impl HardyReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parameter(e.to_string()))?;
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Parameter(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(())
    }

    pub fn trend(&self, s: f64, p: f64) -> Option<&HardyTrend> {
        self.trends.iter().find(|t| (t.point.s - s).abs() < 1e-12 && (t.point.p - p).abs() < 1e-12)
    }

    /// (largest stable s, smallest divergent s) for exponent p, when both exist.
    pub fn transition(&self, p: f64) -> Option<(f64, f64)> {
        let mut pts: Vec<&HardyTrend> = self.trends.iter().filter(|t| (t.point.p - p).abs() < 1e-12).collect();
        pts.sort_by(|a, b| a.point.s.total_cmp(&b.point.s));
        let stable = pts.iter().filter(|t| !t.divergent).map(|t| t.point.s).fold(f64::NAN, f64::max);
        let divergent = pts.iter().filter(|t| t.divergent).map(|t| t.point.s).fold(f64::NAN, f64::min);
        (stable.is_finite() && divergent.is_finite()).then_some((stable, divergent))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    /// Cap on the resolution of the right-hand side.
    pub rhs_level: u32,
    pub frac: FracOptions,
    pub order: usize,
    /// Levels beyond the finest j_max used only for the increment fit.
    pub trend_extra: u32,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { rhs_level: 6, frac: FracOptions::default(), order: 4, trend_extra: 2 }
    }
}

/// sup over the corpus of lhs/rhs per grid point and resolution.
///
/// lhs is the Whitney-cube Hardy functional truncated at each j_max; the
/// right side is ‖f‖_{L^p(G)} + |f|_{W^{s,p}(G)} when q = p and the discrete
/// TL norm of χ_G·f otherwise, both at `min(j_max, rhs_level)`.
pub fn hardy_ratio_sweep(
    domain: &Domain,
    corpus: &[ScalarField],
    grid: &[SweepPoint],
    j_max: &[u32],
    opts: &SweepOptions,
) -> Result<HardyReport> {
    if corpus.is_empty() || grid.is_empty() || j_max.is_empty() {
        return Err(Error::Parameter("sweep needs a corpus, a grid and resolutions".into()));
    }
    for g in grid {
        if !(g.s > 0.0 && g.s * g.p < 2.0 && g.p >= 1.0) {
            return Err(Error::Parameter(format!("grid point s = {}, p = {} violates 0 < s < 2/p", g.s, g.p)));
        }
    }
    let mut levels = j_max.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let top = *levels.last().unwrap() + opts.trend_extra;
    let cover = whitney_cover(domain, top)?;
    let nodes = CoverNodes::new(domain, &cover, opts.order);
    let node_levels: Vec<u32> = cover.cubes.iter().flat_map(|c| std::iter::repeat_n(c.cube.level, opts.order * opts.order)).collect();
    let rhs_level = levels[0].min(opts.rhs_level);
    let rhs_cover = whitney_cover(domain, rhs_level)?;
    let rhs_nodes = CoverNodes::new(domain, &rhs_cover, opts.order);

    let mut rows = Vec::new();
    let mut trends = Vec::new();
    for g in grid {
        let per_fn: Vec<(Vec<f64>, f64)> = corpus
            .iter()
            .map(|field| -> Result<(Vec<f64>, f64)> {
                let f = |x: Point| field.eval(x);
                let sums = level_sums(&f, &nodes, &node_levels, g.s, g.p, top);
                let rhs = if (g.q - g.p).abs() < 1e-12 {
                    let lp = rhs_nodes.lp_norm(&f, g.p);
                    let semi = frac_seminorm(&f, domain, &rhs_cover, g.s, g.p, opts.frac)?;
                    lp + semi.seminorm(g.p)
                } else {
                    let params = NormParams::new(g.s, g.p, g.q)?;
                    let window = cover.frame.root_box();
                    let region = TlRegion::Domain { domain, window };
                    let jm = default_j_min(&cover.frame).min(rhs_level);
                    tl_norm(&f, &params, &region, jm, rhs_level)?.value
                };
                Ok((sums, rhs))
            })
            .collect::<Result<_>>()?;
        let mut sup_ratio = Vec::with_capacity(levels.len());
        for &j in &levels {
            let mut sup = 0.0f64;
            for (id, (sums, rhs)) in per_fn.iter().enumerate() {
                let lhs = compensated_sum(sums[..=j as usize].iter().copied()).powf(1.0 / g.p);
                let ratio = if *rhs > 0.0 { lhs / rhs } else { f64::NAN };
                if ratio.is_finite() {
                    sup = sup.max(ratio);
                }
                rows.push(HardyRow { s: g.s, p: g.p, q: g.q, j_max: j, corpus_id: id, lhs, rhs: *rhs, ratio });
            }
            sup_ratio.push(sup);
        }
        let fit: Vec<u32> = (levels[0] + 1..=top).collect();
        trends.push(trend_of(*g, &fit, sup_ratio, &per_fn));
    }
    Ok(HardyReport { grid: grid.to_vec(), j_max: levels, rhs_level, rows, trends })
}

fn level_sums(
    f: &(dyn Fn(Point) -> f64 + Sync),
    nodes: &CoverNodes,
    node_levels: &[u32],
    s: f64,
    p: f64,
    top: u32,
) -> Vec<f64> {
    let sp = s * p;
    let terms: Vec<(u32, f64)> = nodes
        .whitney
        .par_iter()
        .zip(node_levels.par_iter())
        .map(|(&(x, d, w), &l)| (l, w * f(x).abs().powf(p) * d.powf(-sp)))
        .collect();
    let mut sums = vec![0.0; top as usize + 1];
    let mut acc: Vec<crate::sum::NeumaierSum> = (0..=top).map(|_| crate::sum::NeumaierSum::new()).collect();
    for (l, v) in terms {
        acc[l as usize].add(v);
    }
    for (s, a) in sums.iter_mut().zip(acc) {
        *s = a.value();
    }
    sums
}

fn trend_of(point: SweepPoint, levels: &[u32], sup_ratio: Vec<f64>, per_fn: &[(Vec<f64>, f64)]) -> HardyTrend {
    let max_step_growth = sup_ratio.windows(2).map(|w| w[1] / w[0]).fold(1.0, f64::max);
    let total_growth = sup_ratio.last().unwrap() / sup_ratio[0];
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .filter_map(|&j| {
            let inc: f64 = per_fn.iter().filter(|(_, r)| *r > 0.0).map(|(sums, r)| sums[j as usize] / r.powf(point.p)).sum();
            (inc > 0.0).then(|| (j as f64, inc.log2()))
        })
        .collect();
    let increment_exponent = if pts.len() >= 2 { slope(&pts) } else { f64::NAN };
    HardyTrend {
        point,
        sup_ratio,
        max_step_growth,
        total_growth,
        increment_exponent,
        divergent_by_factor: max_step_growth >= 2.0,
        divergent: increment_exponent >= 0.0,
    }
}
