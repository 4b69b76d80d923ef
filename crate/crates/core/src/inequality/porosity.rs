use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{Point, SetOracle};

/// Candidate porosity constants, tried in order.
pub const KAPPA_GRID: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

const GRID: usize = 17;
const DEFAULT_SEED: u64 = 0x9e37_79b9;

/// Largest hole found in Q(x, r) (half-side r): max over a grid of dist(y, S).
fn widest_hole(set: &dyn SetOracle, x: Point, r: f64) -> f64 {
    let step = 2.0 * r / (GRID - 1) as f64;
    let mut best = 0.0f64;
    for i in 0..GRID {
        for j in 0..GRID {
            let y = Point::new(x.x - r + i as f64 * step, x.y - r + j as f64 * step);
            best = best.max(set.distance(y));
        }
    }
    best
}

/// Smallest κ in [`KAPPA_GRID`] such that every sampled Q(x, r) holds a point y
/// with Q(y, r/κ) ∩ S = ∅; `None` if even κ = 64 fails.
pub fn porosity_constant(set: &dyn SetOracle, scales: &[f64], samples: usize) -> Option<f64> {
    porosity_constant_seeded(set, scales, samples, DEFAULT_SEED)
}

pub fn porosity_constant_seeded(set: &dyn SetOracle, scales: &[f64], samples: usize, seed: u64) -> Option<f64> {
    let needed = required_kappa(set, scales, samples, seed);
    KAPPA_GRID.iter().copied().find(|&k| k >= needed)
}

/// max over samples of √2·r / (widest hole); the sample centres are nearest
/// points of S to uniform points of its bounding box.
pub fn required_kappa(set: &dyn SetOracle, scales: &[f64], samples: usize, seed: u64) -> f64 {
    let bb = set.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Point> = (0..samples)
        .map(|_| {
            let p = Point::new(
                bb.min.x + rng.gen::<f64>() * bb.width(),
                bb.min.y + rng.gen::<f64>() * bb.height(),
            );
            set.nearest(p)
        })
        .collect();
    let jobs: Vec<(Point, f64)> = centers.iter().flat_map(|&x| scales.iter().map(move |&r| (x, r))).collect();
    jobs.par_iter()
        .map(|&(x, r)| {
            let hole = widest_hole(set, x, r);
            if hole > 0.0 {
                std::f64::consts::SQRT_2 * r / hole
            } else {
                f64::INFINITY
            }
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundarySet, Primitive};

    #[test]
    fn line_is_porous() {
        let line = BoundarySet::new(vec![Primitive::Segment(Point::new(-5.0, 0.0), Point::new(5.0, 0.0))]);
        let k = porosity_constant(&line, &[1.0, 0.5, 0.1], 20).unwrap();
        assert!(k <= 4.0);
    }

    #[test]
    fn dense_net_is_not_porous() {
        let delta = 1e-3;
        let n = (1.0 / delta) as usize + 1;
        let prims = (0..n)
            .flat_map(|i| (0..n).map(move |j| Primitive::Point(Point::new(i as f64 * delta, j as f64 * delta))))
            .collect();
        let net = BoundarySet::new(prims);
        assert_eq!(porosity_constant(&net, &[0.25, 0.5], 10), None);
    }
}
