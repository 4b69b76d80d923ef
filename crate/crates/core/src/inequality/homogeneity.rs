use serde::Serialize;

use super::ball::slope;
use crate::approx::{tl_norm, NormParams, ScalarField, TlRegion};
use crate::geometry::{Aabb, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct HomogeneityOptions {
    /// The norms are taken on [−h, h]².
    pub half_width: f64,
    pub j_max: u32,
    /// Coarsest level (None: first level with side ≤ 1).
    pub j_min: Option<u32>,
}

impl Default for HomogeneityOptions {
    fn default() -> Self {
        Self { half_width: 2.0, j_max: 9, j_min: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    pub radii: Vec<f64>,
    /// ‖φ(·/r)‖ per radius.
    pub norms: Vec<f64>,
    /// ‖φ‖.
    pub base_norm: f64,
    /// Least-squares slope of log(‖φ‖/‖φ(·/r)‖) against log r.
    pub slope: f64,
    /// Same slope for the ‖F‖_p part alone.
    pub seminorm_slope: f64,
    /// s − n/p.
    pub expected: f64,
}

/// Scaling exponent of the TL norm: with g = φ(·/r) supported in B(0, r),
/// ‖g(r·)‖ = ‖φ‖ ≃ r^{s−n/p}‖g‖.
pub fn homogeneity_slope(f: &ScalarField, params: &NormParams, radii: &[f64]) -> Result<HomogeneityReport> {
    homogeneity_slope_with(f, params, radii, &HomogeneityOptions::default())
}

pub fn homogeneity_slope_with(
    f: &ScalarField,
    params: &NormParams,
    radii: &[f64],
    opts: &HomogeneityOptions,
) -> Result<HomogeneityReport> {
    if radii.len() < 3 {
        return Err(Error::Parameter(format!("homogeneity slope needs at least 3 radii, got {}", radii.len())));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::Parameter(format!("radius {r} outside (0, 1]")));
    }
    let origin = Point::new(0.0, 0.0);
    let unit = Aabb::centered(origin, 1.0 + 1e-12);
    if f.support().is_some_and(|b| b.area() > 0.0 && !unit.contains_box(&b)) {
        return Err(Error::Precondition("f must be supported in B(0, 1)".into()));
    }
    let region = TlRegion::Box(Aabb::centered(origin, opts.half_width));
    let frame = region.frame();
    let j_min = opts.j_min.unwrap_or_else(|| crate::approx::default_j_min(&frame));
    let norm = |g: &ScalarField| -> Result<(f64, f64)> {
        let eval = |x: Point| g.eval(x);
        let t = tl_norm(&eval, params, &region, j_min, opts.j_max)?;
        Ok((t.value, t.f_norm))
    };
    let (base_norm, base_f) = norm(f)?;
    let mut norms = Vec::with_capacity(radii.len());
    let mut f_norms = Vec::with_capacity(radii.len());
    for &r in radii {
        let g = ScalarField::Dilated { field: Box::new(f.clone()), center: origin, scale: r };
        let (v, fv) = norm(&g)?;
        norms.push(v);
        f_norms.push(fv);
    }
    if base_norm == 0.0 || norms.contains(&0.0) {
        return Err(Error::Undefined("all norms vanish; slope undefined".into()));
    }
    let pts: Vec<(f64, f64)> = radii.iter().zip(&norms).map(|(r, v)| (r.ln(), (base_norm / v).ln())).collect();
    let fpts: Vec<(f64, f64)> = radii.iter().zip(&f_norms).map(|(r, v)| (r.ln(), (base_f / v).ln())).collect();
    Ok(HomogeneityReport {
        radii: radii.to_vec(),
        norms,
        base_norm,
        slope: slope(&pts),
        seminorm_slope: slope(&fpts),
        expected: params.s - 2.0 / params.p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_undefined_slope() {
        let params = NormParams::new(0.5, 2.0, 2.0).unwrap();
        let opts = HomogeneityOptions { j_max: 5, ..Default::default() };
        let r = homogeneity_slope_with(&ScalarField::Zero, &params, &[1.0, 0.5, 0.25], &opts);
        assert!(matches!(r, Err(Error::Undefined(_))));
    }

    #[test]
    fn needs_three_radii() {
        let params = NormParams::new(0.5, 2.0, 2.0).unwrap();
        let r = homogeneity_slope(&ScalarField::Zero, &params, &[1.0, 0.5]);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
