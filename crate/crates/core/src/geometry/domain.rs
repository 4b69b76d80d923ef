use serde::{Deserialize, Serialize};

use super::{Aabb, BoundarySet, Point, Primitive, SetOracle};
use crate::error::{Error, Result};

const MAX_KOCH_LEVEL: u32 = 8;
const MAX_DUST_LEVEL: u32 = 7;

/// How membership in G is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsideRule {
    /// Even–odd rule against the boundary segments (bounded polygon).
    EvenOdd,
    /// G is the complement of the boundary primitives.
    Complement,
}

/// An open planar set G given by its boundary primitives.
///
/// Immutable after construction; every query is pure.
#[derive(Clone, Debug)]
pub struct Domain {
    pub name: String,
    boundary: BoundarySet,
    inside_rule: InsideRule,
    bounding_box: Aabb,
    boundary_diameter: f64,
    known_aikawa_dim: Option<f64>,
    bounded: bool,
    null_complement: bool,
}

impl Domain {
    /// Spatial dimension n. Only the plane is implemented.
    pub fn dimension(&self) -> usize {
        2
    }

    /// `(dist(x, ∂G), x ∈ G)`.
    pub fn boundary_distance(&self, x: Point) -> (f64, bool) {
        let sd = self.boundary.signed_distance(x);
        let d = sd.max(0.0);
        let inside = match self.inside_rule {
            InsideRule::Complement => sd > 0.0,
            InsideRule::EvenOdd => d > 0.0 && self.boundary.ray_crossings(x) % 2 == 1,
        };
        (d, inside)
    }

    /// dist(B, ∂G) for a closed box B.
    pub fn boundary_distance_to_box(&self, b: &Aabb) -> f64 {
        self.boundary.distance_to_box(b)
    }

    pub fn inside(&self, x: Point) -> bool {
        self.boundary_distance(x).1
    }

    pub fn boundary(&self) -> &BoundarySet {
        &self.boundary
    }

    pub fn inside_rule(&self) -> InsideRule {
        self.inside_rule
    }

    /// Bounding box of ∂G.
    pub fn bounding_box(&self) -> Aabb {
        self.bounding_box
    }

    /// diam(∂G).
    pub fn boundary_diameter(&self) -> f64 {
        self.boundary_diameter
    }

    pub fn known_aikawa_dim(&self) -> Option<f64> {
        self.known_aikawa_dim
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    /// Whether ℝⁿ∖G is Lebesgue-null for the fractal this domain approximates.
    pub fn has_null_complement(&self) -> bool {
        self.null_complement
    }

    /// Number of boundary primitives.
    pub fn primitive_count(&self) -> usize {
        self.boundary.primitives().len()
    }

    /// Scale below which the finite approximant is no longer fractal.
    pub fn resolution(&self) -> f64 {
        self.boundary.resolution()
    }

    /// Same domain shifted by `v`.
    pub fn translated(&self, v: Point) -> Domain {
        let prims = self
            .boundary
            .primitives()
            .iter()
            .map(|p| match *p {
                Primitive::Segment(a, b) => Primitive::Segment(a + v, b + v),
                Primitive::Box(b) => Primitive::Box(Aabb::new(b.min + v, b.max + v)),
                Primitive::Point(q) => Primitive::Point(q + v),
            })
            .collect();
        Domain {
            boundary: BoundarySet::new(prims),
            bounding_box: Aabb::new(self.bounding_box.min + v, self.bounding_box.max + v),
            ..self.clone()
        }
    }

    /// G = ℝ² minus a finite union of primitives (points, segments, boxes).
    pub fn complement_of(name: &str, prims: Vec<Primitive>, known_aikawa_dim: Option<f64>) -> Result<Domain> {
        if prims.is_empty() {
            return Err(Error::Geometry("complement domain needs a nonempty set".into()));
        }
        let null_complement = prims.iter().all(|p| !matches!(p, Primitive::Box(_)));
        let boundary = BoundarySet::new(prims);
        let bounding_box = boundary.bounds();
        let boundary_diameter = diameter_of(&corner_points(boundary.primitives()));
        Ok(Domain {
            name: name.to_string(),
            boundary,
            inside_rule: InsideRule::Complement,
            bounding_box,
            boundary_diameter,
            known_aikawa_dim,
            bounded: false,
            null_complement,
        })
    }
}

impl SetOracle for Domain {
    fn distance(&self, x: Point) -> f64 {
        self.boundary.distance(x)
    }

    fn signed_distance(&self, x: Point) -> f64 {
        self.boundary.signed_distance(x)
    }

    fn nearest(&self, x: Point) -> Point {
        self.boundary.nearest(x)
    }

    fn bounds(&self) -> Aabb {
        self.bounding_box
    }

    fn distance_to_box(&self, b: &Aabb) -> f64 {
        self.boundary.distance_to_box(b)
    }

    fn resolution(&self) -> f64 {
        self.boundary.resolution()
    }
}

fn corner_points(prims: &[Primitive]) -> Vec<Point> {
    let mut pts = Vec::with_capacity(prims.len() * 2);
    for p in prims {
        match *p {
            Primitive::Segment(a, b) => {
                pts.push(a);
                pts.push(b);
            }
            Primitive::Box(b) => {
                pts.push(b.min);
                pts.push(b.max);
                pts.push(Point::new(b.min.x, b.max.y));
                pts.push(Point::new(b.max.x, b.min.y));
            }
            Primitive::Point(q) => pts.push(q),
        }
    }
    pts
}

/// Diameter of a point cloud through its convex hull.
fn diameter_of(points: &[Point]) -> f64 {
    let hull = convex_hull(points);
    let mut best: f64 = 0.0;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max(a.dist(*b));
        }
    }
    best
}

fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y).sum::<f64>()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn polygon_segments(v: &[Point]) -> Vec<Primitive> {
    (0..v.len()).map(|i| Primitive::Segment(v[i], v[(i + 1) % v.len()])).collect()
}

fn polygon_from_vertices(name: &str, v: Vec<Point>, known_aikawa_dim: Option<f64>) -> Domain {
    let boundary = BoundarySet::new(polygon_segments(&v));
    let bounding_box = boundary.bounds();
    Domain {
        name: name.to_string(),
        boundary,
        inside_rule: InsideRule::EvenOdd,
        bounding_box,
        boundary_diameter: diameter_of(&v),
        known_aikawa_dim,
        bounded: true,
        null_complement: false,
    }
}

/// Simple closed polygon; inside by the even–odd rule.
pub fn make_polygon_domain(vertices: &[Point]) -> Result<Domain> {
    if vertices.len() < 3 {
        return Err(Error::Geometry(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
    }
    if vertices.iter().any(|p| !p.is_finite()) {
        return Err(Error::Geometry("non-finite vertex".into()));
    }
    let mut bb = Aabb::empty();
    vertices.iter().for_each(|&p| bb.grow(p));
    let scale = bb.diameter();
    if scale == 0.0 || signed_area(vertices).abs() <= 1e-12 * scale * scale {
        return Err(Error::Geometry("degenerate polygon with zero area".into()));
    }
    let n = vertices.len();
    let segs = polygon_segments(vertices);
    let set = BoundarySet::new(segs.clone());
    // Simplicity: non-adjacent edges must not meet, adjacent ones only at the shared vertex.
    for (i, s) in segs.iter().enumerate() {
        let Primitive::Segment(a, b) = *s else { unreachable!() };
        if a == b {
            return Err(Error::Geometry(format!("repeated vertex at index {i}")));
        }
        for j in set.candidates(&s.bounds()) {
            let Primitive::Segment(c, d) = set.primitives()[j] else { unreachable!() };
            if (c, d) == (a, b) {
                continue;
            }
            let adjacent = c == b || d == a;
            if adjacent {
                // Shared vertex only: reject collinear backtracking.
                let (shared, other_a, other_c) = if c == b { (b, a, d) } else { (a, b, c) };
                let o = orient(other_a, shared, other_c);
                if o == 0.0 && (other_a - shared).dot(other_c - shared) > 0.0 {
                    return Err(Error::Geometry("polygon edges overlap".into()));
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Err(Error::Geometry(format!("polygon is self-intersecting near edge {i}")));
            }
        }
    }
    let _ = n;
    Ok(polygon_from_vertices("polygon", vertices.to_vec(), None))
}

/// Vertices of the level-`level` Koch snowflake built on the
/// counter-clockwise unit triangle (0,0), (1,0), (1/2, √3/2).
pub fn koch_vertices(level: u32) -> Vec<Point> {
    let h = 3f64.sqrt() / 2.0;
    let mut v = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, h)];
    let (sin, cos) = (-std::f64::consts::FRAC_PI_3).sin_cos();
    for _ in 0..level {
        let mut next = Vec::with_capacity(v.len() * 4);
        for i in 0..v.len() {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            let third = (b - a) * (1.0 / 3.0);
            let p1 = a + third;
            let p3 = a + third * 2.0;
            // outward bump: rotate by -60° for a counter-clockwise polygon
            let peak = p1 + Point::new(third.x * cos - third.y * sin, third.x * sin + third.y * cos);
            next.extend([a, p1, peak, p3]);
        }
        v = next;
    }
    v
}

/// Koch snowflake approximant with 3·4^level edges of length 3^(−level).
pub fn make_koch_snowflake(level: u32) -> Result<Domain> {
    if level > MAX_KOCH_LEVEL {
        return Err(Error::ResourceLimit(format!("Koch level {level} exceeds {MAX_KOCH_LEVEL}")));
    }
    let mut d = polygon_from_vertices(&format!("koch-{level}"), koch_vertices(level), Some(4f64.ln() / 3f64.ln()));
    d.name = format!("koch-{level}");
    Ok(d)
}

/// Left endpoints of the level-`level` intervals of the middle-gap Cantor set C_λ ⊂ [0,1].
pub fn cantor_left_ends(ratio: f64, level: u32) -> Vec<f64> {
    let mut ends = vec![0.0];
    let mut len = 1.0;
    for _ in 0..level {
        let next_len = len * ratio;
        ends = ends.iter().flat_map(|&a| [a, a + len - next_len]).collect();
        len = next_len;
    }
    ends
}

/// G = ℝ² ∖ K_m with K_m the level-m approximant of C_λ × C_λ.
pub fn make_cantor_dust_complement(ratio: f64, level: u32) -> Result<Domain> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::Parameter(format!("dust ratio must lie in (0, 1/2), got {ratio}")));
    }
    if level > MAX_DUST_LEVEL {
        return Err(Error::ResourceLimit(format!("dust level {level} exceeds {MAX_DUST_LEVEL}")));
    }
    let side = ratio.powi(level as i32);
    let ends = cantor_left_ends(ratio, level);
    let mut prims = Vec::with_capacity(ends.len() * ends.len());
    for &y in &ends {
        for &x in &ends {
            prims.push(Primitive::Box(Aabb::square(Point::new(x, y), side)));
        }
    }
    let dim = 2.0 * 2f64.ln() / (1.0 / ratio).ln();
    let mut d = Domain::complement_of(&format!("dust-{ratio}-{level}"), prims, Some(dim))?;
    d.null_complement = true;
    Ok(d)
}

/// JSON domain descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    Polygon { vertices: Vec<Point> },
    Koch { level: u32 },
    CantorComplement { ratio: f64, level: u32 },
}

impl DomainDescriptor {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainDescriptor::Polygon { vertices } => make_polygon_domain(vertices),
            DomainDescriptor::Koch { level } => make_koch_snowflake(*level),
            DomainDescriptor::CantorComplement { ratio, level } => make_cantor_dust_complement(*ratio, *level),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> Domain {
        make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]).unwrap()
    }

    #[test]
    fn unit_square_basics() {
        let d = unit_square();
        assert!((d.boundary_diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.boundary_distance(Point::new(0.5, 0.5)), (0.5, true));
        let (dist, inside) = d.boundary_distance(Point::new(0.2, 0.5));
        assert!((dist - 0.2).abs() < 1e-15 && inside);
        assert!(!d.inside(Point::new(1.5, 0.5)));
    }

    #[test]
    fn triangle_inradius() {
        let h = 3f64.sqrt() / 2.0;
        let d = make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(0.5, h)]).unwrap();
        let centroid = Point::new(0.5, h / 3.0);
        let (dist, inside) = d.boundary_distance(centroid);
        assert!(inside);
        assert!((dist - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_and_crossing_polygons() {
        let collinear = [Point::new(0., 0.), Point::new(1., 0.), Point::new(2., 0.)];
        assert!(matches!(make_polygon_domain(&collinear), Err(Error::Geometry(_))));
        let bowtie = [Point::new(0., 0.), Point::new(1., 1.), Point::new(1., 0.), Point::new(0., 1.)];
        assert!(matches!(make_polygon_domain(&bowtie), Err(Error::Geometry(_))));
        assert!(make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.)]).is_err());
    }

    #[test]
    fn koch_recurrence() {
        let k0 = make_koch_snowflake(0).unwrap();
        assert_eq!(k0.primitive_count(), 3);
        let k2 = make_koch_snowflake(2).unwrap();
        assert_eq!(k2.primitive_count(), 48);
        for p in k2.boundary().primitives() {
            assert!((p.size() - 1.0 / 9.0).abs() < 1e-12);
        }
        assert!((k2.known_aikawa_dim().unwrap() - 1.2618595071429148).abs() < 1e-12);
        assert!(matches!(make_koch_snowflake(9), Err(Error::ResourceLimit(_))));
        let c = Point::new(0.5, 3f64.sqrt() / 6.0);
        let (d0, _) = k0.boundary_distance(c);
        assert!((d0 - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn koch_levels_contain_previous_inscribed_disk() {
        let c = Point::new(0.5, 3f64.sqrt() / 6.0);
        let r = 1.0 / (2.0 * 3f64.sqrt());
        for level in 1..=4 {
            let d = make_koch_snowflake(level).unwrap();
            let prev = make_koch_snowflake(level - 1).unwrap();
            let (rin, _) = prev.boundary_distance(c);
            assert!(rin >= r - 1e-12);
            for k in 0..64 {
                let t = k as f64 / 64.0 * std::f64::consts::TAU;
                let p = c + Point::new(t.cos(), t.sin()) * (0.999 * rin);
                assert!(d.inside(p), "level {level}");
            }
        }
    }

    #[test]
    fn dust_construction() {
        let d = make_cantor_dust_complement(1.0 / 3.0, 1).unwrap();
        assert_eq!(d.primitive_count(), 4);
        let corners: Vec<Point> = d
            .boundary()
            .primitives()
            .iter()
            .map(|p| p.bounds().min)
            .collect();
        for expect in [Point::new(0., 0.), Point::new(2. / 3., 0.), Point::new(0., 2. / 3.), Point::new(2. / 3., 2. / 3.)] {
            assert!(corners.iter().any(|c| c.dist(expect) < 1e-15));
        }
        assert!((d.known_aikawa_dim().unwrap() - 2.0 * 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        let quarter = make_cantor_dust_complement(0.25, 2).unwrap();
        assert!((quarter.known_aikawa_dim().unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(make_cantor_dust_complement(0.5, 2), Err(Error::Parameter(_))));
        assert!(matches!(make_cantor_dust_complement(0.3, 8), Err(Error::ResourceLimit(_))));
        assert!(!d.inside(Point::new(0.1, 0.1)));
        assert!(d.inside(Point::new(0.5, 0.5)));
        assert!(d.has_null_complement());
    }

    #[test]
    fn dust_distance_matches_brute_force() {
        let d = make_cantor_dust_complement(1.0 / 3.0, 4).unwrap();
        let prims = d.boundary().primitives().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = Point::new(rng.gen_range(-0.2..1.2), rng.gen_range(-0.2..1.2));
            let brute = prims.iter().map(|q| q.closest_point(p).dist(p)).fold(f64::INFINITY, f64::min);
            assert!((d.boundary_distance(p).0 - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn descriptor_json() {
        let desc: DomainDescriptor = serde_json::from_str(r#"{"kind":"cantor_complement","ratio":0.25,"level":2}"#).unwrap();
        assert_eq!(desc.build().unwrap().primitive_count(), 16);
        let desc: DomainDescriptor = serde_json::from_str(r#"{"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert!(desc.build().is_ok());
        let desc: DomainDescriptor = serde_json::from_str(r#"{"kind":"koch","level":1}"#).unwrap();
        assert_eq!(desc.build().unwrap().primitive_count(), 12);
    }
}
