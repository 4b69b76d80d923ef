use rayon::prelude::*;

use crate::dyadic::WhitneyCover;
use crate::geometry::{Domain, Point};
use crate::quadrature::TensorRule;
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Gauss nodes of a Whitney cover with their boundary distances.
///
/// Whitney-cube nodes carry the exact quadrature; collar nodes are the
/// indicator-weighted nodes of the unresolved cells that fall in G.
#[derive(Clone, Debug)]
pub struct CoverNodes {
    pub whitney: Vec<(Point, f64, f64)>,
    pub collar: Vec<(Point, f64, f64)>,
}

impl CoverNodes {
    pub fn new(domain: &Domain, cover: &WhitneyCover, order: usize) -> Self {
        let rule = TensorRule::new(order, 0);
        let whitney = cover
            .cubes
            .par_iter()
            .flat_map_iter(|c| {
                let b = cover.frame.cube_box(&c.cube);
                rule.on_box(&b).map(|(x, w)| (x, domain.boundary_distance(x).0, w)).collect::<Vec<_>>()
            })
            .collect();
        let collar = cover
            .collar
            .par_iter()
            .flat_map_iter(|c| {
                let b = cover.frame.cube_box(c);
                rule.on_box(&b)
                    .filter_map(|(x, w)| {
                        let (d, inside) = domain.boundary_distance(x);
                        (inside && d > 0.0).then_some((x, d, w))
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        Self { whitney, collar }
    }

    /// ‖f‖_{L^p} over the covered part of G (Whitney cubes plus collar nodes).
    pub fn lp_norm(&self, f: &(dyn Fn(Point) -> f64 + Sync), p: f64) -> f64 {
        let all = self.whitney.par_iter().chain(self.collar.par_iter());
        let vals: Vec<f64> = all.map(|&(x, _, w)| w * f(x).abs().powf(p)).collect();
        compensated_sum(vals).powf(1.0 / p)
    }
}

/// (∫_G |f|^p dist^{−sp})^{1/p} split into its resolved and collar parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyFunctional {
    /// Root of the Whitney-cube sum.
    pub value: f64,
    /// Whitney-cube sum before the root.
    pub integral: f64,
    /// Indicator-quadrature estimate of the collar part (before the root).
    pub collar_estimate: f64,
    /// Upper bound sup|f|^p · (collar area) · (c·ℓ_min)^{−sp} with ℓ_min the
    /// collar side, valid where dist ≥ c·ℓ_min.
    pub collar_bound: f64,
}

fn check_sp(s: f64, p: f64) -> Result<()> {
    if !(s > 0.0 && p >= 1.0 && s * p < 2.0) {
        return Err(Error::Parameter(format!("Hardy functional needs s > 0, p ≥ 1, sp < 2 (s = {s}, p = {p})")));
    }
    Ok(())
}

pub fn hardy_functional(
    f: &(dyn Fn(Point) -> f64 + Sync),
    domain: &Domain,
    cover: &WhitneyCover,
    s: f64,
    p: f64,
) -> Result<HardyFunctional> {
    check_sp(s, p)?;
    if cover.collar_measure > cover.resolved_measure {
        return Err(Error::Resolution(format!(
            "cover collar area {:.3e} exceeds resolved area {:.3e}",
            cover.collar_measure, cover.resolved_measure
        )));
    }
    let nodes = CoverNodes::new(domain, cover, 4);
    let side = cover.frame.side_at(cover.j_max);
    Ok(hardy_from_nodes(f, &nodes, s, p, side, cover.collar_measure))
}

pub(crate) fn hardy_from_nodes(
    f: &(dyn Fn(Point) -> f64 + Sync),
    nodes: &CoverNodes,
    s: f64,
    p: f64,
    collar_side: f64,
    collar_measure: f64,
) -> HardyFunctional {
    let sp = s * p;
    let term = |&(x, d, w): &(Point, f64, f64)| w * f(x).abs().powf(p) * d.powf(-sp);
    let integral = compensated_sum(nodes.whitney.par_iter().map(term).collect::<Vec<_>>());
    let collar_estimate = compensated_sum(nodes.collar.par_iter().map(term).collect::<Vec<_>>());
    let sup = nodes.collar.iter().map(|&(x, _, _)| f(x).abs().powf(p)).fold(0.0, f64::max);
    let collar_bound = sup * collar_measure * (0.25 * collar_side).powf(-sp);
    HardyFunctional { value: integral.powf(1.0 / p), integral, collar_estimate, collar_bound }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{whitney_cover, whitney_cover_in_frame, Frame};
    use crate::geometry::{make_polygon_domain, Aabb, Primitive};

    #[test]
    fn zero_function() {
        let g = make_polygon_domain(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)])
            .unwrap();
        let cover = whitney_cover(&g, 6).unwrap();
        let h = hardy_functional(&|_| 0.0, &g, &cover, 0.5, 2.0).unwrap();
        assert_eq!(h.value, 0.0);
    }

    #[test]
    fn punctured_plane_closed_form() {
        let g = Domain::complement_of("punctured", vec![Primitive::Point(Point::new(0.0, 0.0))], Some(0.0)).unwrap();
        let frame = Frame::from_box(&Aabb::centered(Point::new(0.0, 0.0), 1.0));
        let cover = whitney_cover_in_frame(&g, frame, 10).unwrap();
        let h = hardy_functional(&|_| 1.0, &g, &cover, 0.5, 2.0).unwrap();
        let exact = (8.0 * (1.0 + 2f64.sqrt()).ln()).sqrt();
        assert!((h.value / exact - 1.0).abs() < 0.01, "{} vs {exact}", h.value);
    }

    #[test]
    fn monotone_in_s_when_close_to_boundary() {
        let g = make_polygon_domain(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)])
            .unwrap();
        let cover = whitney_cover(&g, 7).unwrap();
        let f = |x: Point| x.x * x.y;
        let mut prev = 0.0;
        for s in [0.1, 0.3, 0.5, 0.7] {
            let v = hardy_functional(&f, &g, &cover, s, 2.0).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }
}
