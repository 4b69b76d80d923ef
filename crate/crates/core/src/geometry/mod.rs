//! Planar domains with exact distance-to-boundary oracles.

mod bvh;
mod domain;

pub use bvh::BoundarySet;
pub use domain::{make_cantor_dust_complement, make_koch_snowflake, make_polygon_domain, Domain, DomainDescriptor, InsideRule};

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(a: [f64; 2]) -> Self {
        Point::new(a[0], a[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn square(corner: Point, side: f64) -> Self {
        Self::new(corner, Point::new(corner.x + side, corner.y + side))
    }

    pub fn centered(center: Point, half: f64) -> Self {
        Self::new(
            Point::new(center.x - half, center.y - half),
            Point::new(center.x + half, center.y + half),
        )
    }

    pub fn empty() -> Self {
        Self::new(
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y))
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn grow(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        let mut b = *self;
        b.grow(o.min);
        b.grow(o.max);
        b
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_box(&self, o: &Aabb) -> bool {
        self.contains(o.min) && self.contains(o.max)
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    /// Area of the intersection (zero when the boxes only touch).
    pub fn overlap_area(&self, o: &Aabb) -> f64 {
        let w = self.max.x.min(o.max.x) - self.min.x.max(o.min.x);
        let h = self.max.y.min(o.max.y) - self.min.y.max(o.min.y);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn dist_to_point(&self, p: Point) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    /// Largest distance from `p` to a point of the box.
    pub fn max_dist_to_point(&self, p: Point) -> f64 {
        let dx = (p.x - self.min.x).abs().max((p.x - self.max.x).abs());
        let dy = (p.y - self.min.y).abs().max((p.y - self.max.y).abs());
        dx.hypot(dy)
    }

    pub fn dist_to_box(&self, o: &Aabb) -> f64 {
        let dx = (o.min.x - self.max.x).max(self.min.x - o.max.x).max(0.0);
        let dy = (o.min.y - self.max.y).max(self.min.y - o.max.y).max(0.0);
        dx.hypot(dy)
    }

    /// Box scaled about its center by `factor`.
    pub fn dilate(&self, factor: f64) -> Aabb {
        let c = self.center();
        let hx = 0.5 * self.width() * factor;
        let hy = 0.5 * self.height() * factor;
        Aabb::new(Point::new(c.x - hx, c.y - hy), Point::new(c.x + hx, c.y + hy))
    }
}

/// Boundary building blocks of a domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Segment(Point, Point),
    /// Closed filled square (or rectangle).
    Box(Aabb),
    Point(Point),
}

impl Primitive {
    pub fn bounds(&self) -> Aabb {
        match *self {
            Primitive::Segment(a, b) => {
                let mut bb = Aabb::new(a, a);
                bb.grow(b);
                bb
            }
            Primitive::Box(b) => b,
            Primitive::Point(p) => Aabb::new(p, p),
        }
    }

    /// Nearest point of the primitive to `p`.
    pub fn closest_point(&self, p: Point) -> Point {
        match *self {
            Primitive::Segment(a, b) => {
                let ab = b - a;
                let len2 = ab.dot(ab);
                if len2 == 0.0 {
                    return a;
                }
                let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
                a + ab * t
            }
            Primitive::Box(b) => Point::new(p.x.clamp(b.min.x, b.max.x), p.y.clamp(b.min.y, b.max.y)),
            Primitive::Point(q) => q,
        }
    }

    /// Distance from the primitive to a closed box (zero when they meet).
    pub fn dist_to_box(&self, bx: &Aabb) -> f64 {
        match *self {
            Primitive::Point(q) => bx.dist_to_point(q),
            Primitive::Box(b) => bx.dist_to_box(&b),
            Primitive::Segment(a, b) => {
                if segment_meets_box(a, b, bx) {
                    return 0.0;
                }
                let corners = [
                    bx.min,
                    Point::new(bx.max.x, bx.min.y),
                    Point::new(bx.min.x, bx.max.y),
                    bx.max,
                ];
                let mut d = bx.dist_to_point(a).min(bx.dist_to_point(b));
                for c in corners {
                    d = d.min(self.closest_point(c).dist(c));
                }
                d
            }
        }
    }

    /// Signed distance: negative depth inside a filled box, otherwise the distance.
    pub fn signed_distance(&self, p: Point) -> f64 {
        match *self {
            Primitive::Box(b) if b.contains(p) => {
                let depth = (p.x - b.min.x)
                    .min(b.max.x - p.x)
                    .min(p.y - b.min.y)
                    .min(b.max.y - p.y);
                -depth
            }
            _ => self.closest_point(p).dist(p),
        }
    }

    /// Characteristic size, used as the approximant's resolution scale.
    pub fn size(&self) -> f64 {
        match *self {
            Primitive::Segment(a, b) => a.dist(b),
            Primitive::Box(b) => b.width().min(b.height()),
            Primitive::Point(_) => 0.0,
        }
    }
}

/// A closed set queried through its distance function.
pub trait SetOracle: Sync {
    /// Euclidean distance from `x` to the set.
    fn distance(&self, x: Point) -> f64;

    /// Distance, negative (minus depth) where the set has interior.
    fn signed_distance(&self, x: Point) -> f64 {
        self.distance(x)
    }

    /// A nearest point of the set.
    fn nearest(&self, x: Point) -> Point;

    /// Bounding box of the set.
    fn bounds(&self) -> Aabb;

    /// Smallest scale at which the set is resolved (0 for exact sets).
    fn resolution(&self) -> f64 {
        0.0
    }

    /// Distance from the box to the set (0 when they meet).
    fn distance_to_box(&self, b: &Aabb) -> f64 {
        (self.distance(b.center()) - 0.5 * b.diameter()).max(0.0)
    }
}

/// Liang–Barsky clip of segment ab against a closed box.
fn segment_meets_box(a: Point, b: Point, bx: &Aabb) -> bool {
    let d = b - a;
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [
        (-d.x, a.x - bx.min.x),
        (d.x, bx.max.x - a.x),
        (-d.y, a.y - bx.min.y),
        (d.y, bx.max.y - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}
