use std::collections::HashSet;

use super::{DyadicCube, Frame};
use crate::geometry::SetOracle;

/// Dyadic cubes Q of the frame with `dist(x_Q, S) ≤ γ·ℓ(Q)`, levels `0..=j_max`.
#[derive(Clone, Debug)]
pub struct NearBoundaryFamily {
    pub frame: Frame,
    pub gamma: f64,
    pub j_max: u32,
    /// Sorted by (level, ix, iy).
    pub cubes: Vec<DyadicCube>,
    members: HashSet<DyadicCube>,
}

impl NearBoundaryFamily {
    pub fn contains(&self, c: &DyadicCube) -> bool {
        self.members.contains(c)
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Cubes at a single level.
    pub fn level(&self, j: u32) -> impl Iterator<Item = &DyadicCube> {
        self.cubes.iter().filter(move |c| c.level == j)
    }
}

/// Membership predicate for a single cube.
pub fn is_near(set: &dyn SetOracle, frame: &Frame, gamma: f64, c: &DyadicCube) -> bool {
    set.distance(frame.center(c)) <= gamma * frame.side_at(c.level)
}

/// Tree descent from the frame root; a cube is explored only when one of its
/// descendants can still satisfy the predicate.
pub fn near_boundary_cubes(set: &dyn SetOracle, frame: Frame, gamma: f64, j_max: u32) -> NearBoundaryFamily {
    assert!(gamma > 0.0, "γ must be positive");
    let mut cubes = Vec::new();
    let mut stack = vec![DyadicCube::ROOT];
    while let Some(q) = stack.pop() {
        let l = frame.side_at(q.level);
        let d = set.distance(frame.center(&q));
        if d <= gamma * l {
            cubes.push(q);
        }
        // descendant centres are within diam/2 of x_Q and have side ≤ ℓ/2
        if q.level < j_max && d - std::f64::consts::SQRT_2 * l / 2.0 <= gamma * l / 2.0 {
            stack.extend(q.children());
        }
    }
    cubes.sort();
    let members = cubes.iter().copied().collect();
    NearBoundaryFamily { frame, gamma, j_max, cubes, members }
}
