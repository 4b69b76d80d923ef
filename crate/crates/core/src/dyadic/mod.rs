//! Dyadic lattice, Whitney covers and the near-boundary families C_{S,γ}.

mod family;
mod whitney;

pub use family::{is_near, near_boundary_cubes, NearBoundaryFamily};
pub use whitney::{verify_whitney, whitney_cover, whitney_cover_in_frame, whitney_cover_of_exterior, DILATION, CoverCube, WhitneyCover, WhitneyReport};

use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, Domain, Point};

/// Affine placement of the dyadic lattice: the level-0 cube is
/// `[origin, origin + side]²`, so level-j cubes have side `side·2^(−j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub origin: Point,
    pub side: f64,
}

impl Frame {
    pub fn new(origin: Point, side: f64) -> Self {
        assert!(side > 0.0 && side.is_finite(), "frame side must be positive");
        Self { origin, side }
    }

    /// Lattice anchored at the bounding-box corner of ∂G. Bounded domains get
    /// the smallest square containing ∂G; unbounded ones a square twice as
    /// large, centred on ∂G, so that ∂G sits well inside the root cube.
    pub fn for_domain(domain: &Domain) -> Self {
        let bb = domain.bounding_box();
        let mut side = bb.width().max(bb.height());
        if side <= 0.0 {
            side = 1.0;
        }
        if domain.is_bounded() {
            Frame::new(bb.min, side)
        } else {
            let c = bb.center();
            let side = if bb.width().max(bb.height()) > 0.0 { side } else { 0.5 };
            Frame::new(Point::new(c.x - side, c.y - side), 2.0 * side)
        }
    }

    /// Frame whose root cube is exactly `b` (which must be square).
    pub fn from_box(b: &Aabb) -> Self {
        Frame::new(b.min, b.width().max(b.height()))
    }

    pub fn side_at(&self, level: u32) -> f64 {
        self.side * 0.5f64.powi(level as i32)
    }

    pub fn cube_box(&self, c: &DyadicCube) -> Aabb {
        let s = self.side_at(c.level);
        Aabb::square(
            Point::new(self.origin.x + c.ix as f64 * s, self.origin.y + c.iy as f64 * s),
            s,
        )
    }

    pub fn center(&self, c: &DyadicCube) -> Point {
        let s = self.side_at(c.level);
        Point::new(
            self.origin.x + (c.ix as f64 + 0.5) * s,
            self.origin.y + (c.iy as f64 + 0.5) * s,
        )
    }

    pub fn root_box(&self) -> Aabb {
        Aabb::square(self.origin, self.side)
    }

    /// Level-`level` cube containing `p` (half-open cells).
    pub fn locate(&self, p: Point, level: u32) -> DyadicCube {
        let s = self.side_at(level);
        DyadicCube::new(
            level,
            ((p.x - self.origin.x) / s).floor() as i64,
            ((p.y - self.origin.y) / s).floor() as i64,
        )
    }

    /// World length → lattice units (root side = 1).
    pub fn to_lattice(&self, len: f64) -> f64 {
        len / self.side
    }
}

/// Dyadic cube of level j (side 2^(−j) in lattice units) with integer
/// lattice index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
}

impl DyadicCube {
    pub const ROOT: DyadicCube = DyadicCube { level: 0, ix: 0, iy: 0 };

    pub const fn new(level: u32, ix: i64, iy: i64) -> Self {
        Self { level, ix, iy }
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        (self.level > 0).then(|| DyadicCube::new(self.level - 1, self.ix.div_euclid(2), self.iy.div_euclid(2)))
    }

    /// Children in the order (0,0), (1,0), (0,1), (1,1).
    pub fn children(&self) -> [DyadicCube; 4] {
        let (l, x, y) = (self.level + 1, 2 * self.ix, 2 * self.iy);
        [
            DyadicCube::new(l, x, y),
            DyadicCube::new(l, x + 1, y),
            DyadicCube::new(l, x, y + 1),
            DyadicCube::new(l, x + 1, y + 1),
        ]
    }

    pub fn child(&self, i: usize) -> DyadicCube {
        self.children()[i]
    }

    /// Ancestor at `level` (≤ own level).
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        assert!(level <= self.level);
        let shift = self.level - level;
        DyadicCube::new(level, self.ix >> shift, self.iy >> shift)
    }

    /// Q ⊆ self (as closed cubes), by integer arithmetic.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        other.level >= self.level && other.ancestor(self.level) == *self
    }

    /// Nested or with disjoint interiors; true for every pair of dyadic cubes.
    pub fn nested_or_disjoint(&self, other: &DyadicCube) -> bool {
        if self.contains(other) || other.contains(self) {
            return true;
        }
        let l = self.level.max(other.level);
        let (a, b) = (self.scaled_range(l), other.scaled_range(l));
        a.0 .1 <= b.0 .0 || b.0 .1 <= a.0 .0 || a.1 .1 <= b.1 .0 || b.1 .1 <= a.1 .0
    }

    /// Index ranges [lo, hi) of level-`l` cells covered by this cube.
    fn scaled_range(&self, l: u32) -> ((i64, i64), (i64, i64)) {
        let k = 1i64 << (l - self.level);
        ((self.ix * k, (self.ix + 1) * k), (self.iy * k, (self.iy + 1) * k))
    }

    /// Closed cubes share at least a point.
    pub fn touches(&self, other: &DyadicCube) -> bool {
        let l = self.level.max(other.level);
        let (a, b) = (self.scaled_range(l), other.scaled_range(l));
        a.0 .0 <= b.0 .1 && b.0 .0 <= a.0 .1 && a.1 .0 <= b.1 .1 && b.1 .0 <= a.1 .1
    }

    /// Side length in lattice units.
    pub fn lattice_side(&self) -> f64 {
        0.5f64.powi(self.level as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cube() -> impl Strategy<Value = DyadicCube> {
        (0u32..8).prop_flat_map(|l| {
            let m = 1i64 << l;
            (Just(l), 0..m, 0..m).prop_map(|(l, x, y)| DyadicCube::new(l, x, y))
        })
    }

    proptest! {
        #[test]
        fn parent_of_child_is_self(q in cube(), i in 0usize..4) {
            prop_assert_eq!(q.child(i).parent(), Some(q));
        }

        #[test]
        fn dyadic_cubes_nest_or_are_disjoint(a in cube(), b in cube()) {
            prop_assert!(a.nested_or_disjoint(&b));
            let f = Frame::new(Point::new(0.0, 0.0), 1.0);
            let overlap = f.cube_box(&a).overlap_area(&f.cube_box(&b));
            let nested = a.contains(&b) || b.contains(&a);
            prop_assert_eq!(overlap > 0.0, nested);
        }

        #[test]
        fn locate_is_consistent_with_boxes(x in 0.0f64..1.0, y in 0.0f64..1.0, l in 0u32..12) {
            let f = Frame::new(Point::new(-0.5, 0.25), 2.0);
            let p = Point::new(-0.5 + 2.0 * x, 0.25 + 2.0 * y);
            let q = f.locate(p, l);
            prop_assert!(f.cube_box(&q).contains(p));
        }
    }

    #[test]
    fn touching() {
        let a = DyadicCube::new(2, 1, 1);
        assert!(a.touches(&DyadicCube::new(2, 2, 2)));
        assert!(a.touches(&DyadicCube::new(3, 4, 1)));
        assert!(!a.touches(&DyadicCube::new(2, 3, 1)));
        assert!(!a.touches(&DyadicCube::new(4, 12, 4)));
    }
}
