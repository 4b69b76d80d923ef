use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::ball::{BallDecomposition, BallOptions};
use crate::dyadic::{DyadicCube, Frame, NearBoundaryFamily};
use crate::geometry::{Domain, Point, SetOracle};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

const PLANE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpRow {
    pub r: f64,
    /// ∫_{B(x, r/2)} dist(y, ∂G)^{−sp} dy.
    pub lhs: f64,
    /// c·r^{n−sp}, c calibrated at the largest radius.
    pub rhs: f64,
    /// lhs / r^{n−sp}.
    pub normalized: f64,
}

/// Scale behaviour of ∫_{B(x, r/2)} dist^{−sp} against r^{n−sp}.
pub fn bump_dimension_test(domain: &Domain, x: Point, radii: &[f64], s: f64, p: f64) -> Result<Vec<BumpRow>> {
    if !domain.has_null_complement() {
        return Err(Error::Precondition(format!("{} does not have a null complement", domain.name)));
    }
    if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::Parameter("radii must be nonempty and lie in (0, 1]".into()));
    }
    let sp = s * p;
    if !(sp > 0.0 && sp < PLANE) {
        return Err(Error::Parameter(format!("sp = {sp} must lie in (0, 2)")));
    }
    let set = domain.boundary();
    let lhs: Vec<f64> = radii
        .iter()
        .map(|&r| BallDecomposition::new(set, x, 0.5 * r, &BallOptions::default()).integrate(|d| d.powf(-sp), 4).value)
        .collect();
    let (imax, rmax) = radii.iter().copied().enumerate().fold((0, 0.0), |a, (i, r)| if r > a.1 { (i, r) } else { a });
    let c = lhs[imax] / rmax.powf(PLANE - sp);
    Ok(radii
        .iter()
        .zip(lhs)
        .map(|(&r, l)| BumpRow { r, lhs: l, rhs: c * r.powf(PLANE - sp), normalized: l / r.powf(PLANE - sp) })
        .collect())
}

/// ((⨍_B dist^{−sp})^{1/p}, ⨍_B dist^{−s}) over B = B(x, r), dist to `set`.
pub fn reverse_holder_dist(set: &dyn SetOracle, x: Point, r: f64, s: f64, p: f64) -> Result<(f64, f64)> {
    if !(s > 0.0 && p >= 1.0 && s * p < PLANE) {
        return Err(Error::Parameter(format!("need s > 0, p ≥ 1, sp < 2 (s = {s}, p = {p})")));
    }
    if !(r > 0.0) {
        return Err(Error::Parameter(format!("radius must be positive, got {r}")));
    }
    if set.distance(x) > set.resolution().max(1e-9 * r) {
        return Err(Error::Precondition(format!("centre ({}, {}) is not on the set", x.x, x.y)));
    }
    let ball = BallDecomposition::new(set, x, r, &BallOptions::default());
    let area = std::f64::consts::PI * r * r;
    let a = ball.integrate(|d| d.powf(-s * p), 4).value / area;
    let b = ball.integrate(|d| d.powf(-s), 4).value / area;
    Ok((a.powf(1.0 / p), b))
}

/// (‖Σ χ_Q a_Q‖_p, ‖(Σ (χ_Q a_Q)^q)^{1/q}‖_p) computed exactly on the cells
/// of the dyadic arrangement. Repeated cubes have their weights added.
pub fn reverse_holder_cubes(frame: &Frame, weights: &[(DyadicCube, f64)], p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite() && q > 1.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("p, q must lie in (1, ∞), got p = {p}, q = {q}")));
    }
    let mut weight: HashMap<DyadicCube, f64> = HashMap::new();
    for &(c, a) in weights {
        if !(a >= 0.0) {
            return Err(Error::Parameter(format!("negative weight {a}")));
        }
        if a > 0.0 {
            *weight.entry(c).or_insert(0.0) += a;
        }
    }
    let mut nodes: HashSet<DyadicCube> = HashSet::new();
    for &c in weight.keys() {
        let mut cur = Some(c);
        while let Some(q) = cur {
            if !nodes.insert(q) {
                break;
            }
            cur = q.parent();
        }
    }
    let roots: Vec<DyadicCube> = {
        let mut r: Vec<DyadicCube> = nodes.iter().filter(|c| c.level == 0).copied().collect();
        r.sort();
        r
    };
    let (mut lhs, mut rhs) = (NeumaierSum::new(), NeumaierSum::new());
    let mut stack: Vec<(DyadicCube, f64, f64)> = roots.into_iter().map(|c| (c, 0.0, 0.0)).collect();
    while let Some((c, mut s1, mut sq)) = stack.pop() {
        if let Some(&a) = weight.get(&c) {
            s1 += a;
            sq += a.powf(q);
        }
        let side = frame.side_at(c.level);
        let mut free = side * side;
        for child in c.children() {
            if nodes.contains(&child) {
                let cs = frame.side_at(child.level);
                free -= cs * cs;
                stack.push((child, s1, sq));
            }
        }
        if free > 0.0 && s1 > 0.0 {
            lhs.add(free * s1.powf(p));
            rhs.add(free * sq.powf(p / q));
        }
    }
    Ok((lhs.value().powf(1.0 / p), rhs.value().powf(1.0 / p)))
}

/// [`reverse_holder_cubes`] on a near-boundary family, weights in family order.
pub fn reverse_holder_family(family: &NearBoundaryFamily, weights: &[f64], p: f64, q: f64) -> Result<(f64, f64)> {
    if weights.len() != family.cubes.len() {
        return Err(Error::Parameter(format!("{} weights for {} cubes", weights.len(), family.cubes.len())));
    }
    let pairs: Vec<(DyadicCube, f64)> = family.cubes.iter().copied().zip(weights.iter().copied()).collect();
    reverse_holder_cubes(&family.frame, &pairs, p, q)
}

/// lhs/rhs of [`reverse_holder_family`] for `vectors` seeded U(0, 1) weight
/// vectors. A cube's weight depends only on (seed, vector, cube), so families
/// at different resolutions share weights on common cubes.
pub fn reverse_holder_constant(family: &NearBoundaryFamily, vectors: usize, p: f64, q: f64, seed: u64) -> Result<Vec<f64>> {
    (0..vectors as u64)
        .into_par_iter()
        .map(|v| {
            let weights: Vec<f64> = family
                .cubes
                .iter()
                .map(|c| {
                    let key = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
                        ^ (v << 48)
                        ^ ((c.level as u64) << 40)
                        ^ (((c.ix as u64) & 0xF_FFFF) << 20)
                        ^ ((c.iy as u64) & 0xF_FFFF);
                    ChaCha8Rng::seed_from_u64(key).gen::<f64>()
                })
                .collect();
            let (l, r) = reverse_holder_family(family, &weights, p, q)?;
            Ok(l / r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundarySet, Primitive};
    use std::f64::consts::PI;

    fn unit() -> Frame {
        Frame::new(Point::new(0.0, 0.0), 1.0)
    }

    #[test]
    fn single_cube() {
        let c = DyadicCube::new(2, 1, 3);
        let (l, r) = reverse_holder_cubes(&unit(), &[(c, 5.0)], 2.0, 3.0).unwrap();
        let expect = 5.0 * (1.0f64 / 16.0).powf(0.5);
        assert!((l - expect).abs() < 1e-12 && (r - expect).abs() < 1e-12);
    }

    #[test]
    fn disjoint_cubes_agree() {
        let w = [(DyadicCube::new(1, 0, 0), 2.0), (DyadicCube::new(2, 3, 3), 0.5), (DyadicCube::new(3, 7, 0), 4.0)];
        let (l, r) = reverse_holder_cubes(&unit(), &w, 3.0, 1.5).unwrap();
        assert!((l - r).abs() < 1e-12 * l);
    }

    #[test]
    fn tower_matches_pixels() {
        for m in 1..=6u32 {
            let tower: Vec<(DyadicCube, f64)> = (0..=m).map(|j| (DyadicCube::new(j, 0, 0), 1.0)).collect();
            let (l, r) = reverse_holder_cubes(&unit(), &tower, 2.0, 2.0).unwrap();
            let n = 1i64 << (m + 2);
            let h = 1.0 / n as f64;
            let (mut pl, mut pr) = (0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let x = Point::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                    let k = (0..=m).filter(|&lv| unit().cube_box(&DyadicCube::new(lv, 0, 0)).contains(x)).count() as f64;
                    pl += h * h * k * k;
                    pr += h * h * k;
                }
            }
            assert!((l - pl.sqrt()).abs() < 1e-3 * l && (r - pr.sqrt()).abs() < 1e-3 * r, "m={m}");
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let r = reverse_holder_cubes(&unit(), &[(DyadicCube::ROOT, -1.0)], 2.0, 2.0);
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn point_closed_forms() {
        let e = BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))]);
        let (s, p, r) = (0.4, 2.0, 0.5);
        let (l, rh) = reverse_holder_dist(&e, Point::new(0.0, 0.0), r, s, p).unwrap();
        let l_exact = (2.0 * r.powf(-s * p) / (2.0 - s * p)).powf(1.0 / p);
        let r_exact = 2.0 * r.powf(-s) / (2.0 - s);
        assert!((l / l_exact - 1.0).abs() < 0.01 && (rh / r_exact - 1.0).abs() < 0.01);
        let (a, b) = reverse_holder_dist(&e, Point::new(0.0, 0.0), r, 0.7, 1.0).unwrap();
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn point_bump_closed_form() {
        let g = Domain::complement_of("punctured", vec![Primitive::Point(Point::new(0.0, 0.0))], Some(0.0)).unwrap();
        let (s, p) = (0.3, 2.0);
        let rows = bump_dimension_test(&g, Point::new(0.0, 0.0), &[1.0, 0.5], s, p).unwrap();
        for row in rows {
            let exact = 2.0 * PI * (0.5 * row.r).powf(2.0 - s * p) / (2.0 - s * p);
            assert!((row.lhs / exact - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn bump_needs_null_complement() {
        let g = crate::geometry::make_koch_snowflake(2).unwrap();
        let r = bump_dimension_test(&g, Point::new(0.0, 0.0), &[1.0], 0.3, 2.0);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
