use super::{Aabb, Point, Primitive, SetOracle};

const LEAF_SIZE: usize = 4;

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Children for interior nodes, primitive range for leaves.
    left: u32,
    right: u32,
    leaf: bool,
}

/// A finite union of primitives with a bounding-volume tree for
/// nearest-distance and ray-crossing queries.
#[derive(Clone, Debug)]
pub struct BoundarySet {
    prims: Vec<Primitive>,
    nodes: Vec<Node>,
    bounds: Aabb,
    resolution: f64,
}

impl BoundarySet {
    pub fn new(prims: Vec<Primitive>) -> Self {
        assert!(!prims.is_empty(), "boundary set needs at least one primitive");
        let mut prims = prims;
        let mut nodes = Vec::with_capacity(2 * prims.len() / LEAF_SIZE + 1);
        let n = prims.len();
        build(&mut prims, 0, n, &mut nodes);
        let bounds = nodes[0].bounds;
        let resolution = prims.iter().map(Primitive::size).fold(f64::INFINITY, f64::min);
        Self { prims, nodes, bounds, resolution }
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.prims
    }

    /// Nearest primitive point and its signed distance.
    fn query(&self, p: Point) -> (f64, Point) {
        let mut best = f64::INFINITY;
        let mut best_pt = p;
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].bounds.dist_to_point(p)));
        while let Some((id, lb)) = stack.pop() {
            if lb > best {
                continue;
            }
            let node = &self.nodes[id as usize];
            if node.leaf {
                for prim in &self.prims[node.left as usize..node.right as usize] {
                    let d = prim.signed_distance(p);
                    if d < best {
                        best = d;
                        best_pt = prim.closest_point(p);
                    }
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].bounds.dist_to_point(p);
                let dr = self.nodes[r as usize].bounds.dist_to_point(p);
                // nearer child popped first
                if dl < dr {
                    stack.push((r, dr));
                    stack.push((l, dl));
                } else {
                    stack.push((l, dl));
                    stack.push((r, dr));
                }
            }
        }
        (best, best_pt)
    }

    /// Distance from the set to a closed box.
    pub fn distance_to_box(&self, b: &Aabb) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack: Vec<(u32, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].bounds.dist_to_box(b)));
        while let Some((id, lb)) = stack.pop() {
            if lb >= best {
                continue;
            }
            let node = &self.nodes[id as usize];
            if node.leaf {
                for prim in &self.prims[node.left as usize..node.right as usize] {
                    best = best.min(prim.dist_to_box(b));
                }
                if best == 0.0 {
                    return 0.0;
                }
            } else {
                let (l, r) = (node.left, node.right);
                let dl = self.nodes[l as usize].bounds.dist_to_box(b);
                let dr = self.nodes[r as usize].bounds.dist_to_box(b);
                if dl < dr {
                    stack.push((r, dr));
                    stack.push((l, dl));
                } else {
                    stack.push((l, dl));
                    stack.push((r, dr));
                }
            }
        }
        best
    }

    /// Number of segments crossed by the ray from `p` in the +x direction
    /// (half-open rule on the y-range of each segment).
    pub fn ray_crossings(&self, p: Point) -> usize {
        let mut count = 0;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            let b = &node.bounds;
            if b.max.x < p.x || b.min.y > p.y || b.max.y < p.y {
                continue;
            }
            if node.leaf {
                for prim in &self.prims[node.left as usize..node.right as usize] {
                    if let Primitive::Segment(a, c) = *prim {
                        if (a.y > p.y) != (c.y > p.y) {
                            let x = a.x + (p.y - a.y) * (c.x - a.x) / (c.y - a.y);
                            if x > p.x {
                                count += 1;
                            }
                        }
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        count
    }

    /// Indices of primitives whose bounding boxes intersect `b`.
    pub fn candidates(&self, b: &Aabb) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id as usize];
            if !node.bounds.intersects(b) {
                continue;
            }
            if node.leaf {
                for i in node.left as usize..node.right as usize {
                    if self.prims[i].bounds().intersects(b) {
                        out.push(i);
                    }
                }
            } else {
                stack.push(node.left);
                stack.push(node.right);
            }
        }
        out
    }
}

fn build(prims: &mut [Primitive], lo: usize, hi: usize, nodes: &mut Vec<Node>) -> u32 {
    let mut bounds = Aabb::empty();
    for p in &prims[lo..hi] {
        bounds = bounds.union(&p.bounds());
    }
    let id = nodes.len() as u32;
    nodes.push(Node { bounds, left: lo as u32, right: hi as u32, leaf: true });
    if hi - lo <= LEAF_SIZE {
        return id;
    }
    let split_x = bounds.width() >= bounds.height();
    let key = |p: &Primitive| {
        let c = p.bounds().center();
        if split_x {
            c.x
        } else {
            c.y
        }
    };
    let mid = (lo + hi) / 2;
    prims[lo..hi].select_nth_unstable_by(mid - lo, |a, b| key(a).total_cmp(&key(b)));
    let l = build(prims, lo, mid, nodes);
    let r = build(prims, mid, hi, nodes);
    let node = &mut nodes[id as usize];
    node.leaf = false;
    node.left = l;
    node.right = r;
    id
}

impl SetOracle for BoundarySet {
    fn distance(&self, x: Point) -> f64 {
        self.query(x).0.max(0.0)
    }

    fn signed_distance(&self, x: Point) -> f64 {
        self.query(x).0
    }

    fn nearest(&self, x: Point) -> Point {
        self.query(x).1
    }

    fn bounds(&self) -> Aabb {
        self.bounds
    }

    fn resolution(&self) -> f64 {
        self.resolution
    }

    fn distance_to_box(&self, b: &Aabb) -> f64 {
        BoundarySet::distance_to_box(self, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn box_distance_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prims: Vec<Primitive> = (0..200)
            .map(|_| {
                let a = Point::new(rng.gen(), rng.gen());
                let b = a + Point::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
                Primitive::Segment(a, b)
            })
            .collect();
        let set = BoundarySet::new(prims.clone());
        for _ in 0..200 {
            let c = Point::new(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
            let bx = Aabb::centered(c, rng.gen_range(0.001..0.1));
            let brute = prims.iter().map(|p| p.dist_to_box(&bx)).fold(f64::INFINITY, f64::min);
            assert_eq!(set.distance_to_box(&bx), brute);
            // sampled upper bound
            let mut sampled = f64::INFINITY;
            for i in 0..=20 {
                for j in 0..=20 {
                    let p = Point::new(bx.min.x + bx.width() * i as f64 / 20.0, bx.min.y + bx.height() * j as f64 / 20.0);
                    sampled = sampled.min(set.distance(p));
                }
            }
            assert!(brute <= sampled + 1e-12);
            assert!(sampled - brute <= bx.width() / 20.0 * 2f64.sqrt() + 1e-12);
        }
    }

    #[test]
    fn matches_brute_force_on_random_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prims: Vec<Primitive> = (0..300)
            .map(|_| {
                let a = Point::new(rng.gen(), rng.gen());
                let b = a + Point::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05));
                Primitive::Segment(a, b)
            })
            .collect();
        let set = BoundarySet::new(prims.clone());
        for _ in 0..500 {
            let p = Point::new(rng.gen_range(-0.5..1.5), rng.gen_range(-0.5..1.5));
            let brute = prims.iter().map(|q| q.signed_distance(p)).fold(f64::INFINITY, f64::min);
            assert!((set.distance(p) - brute).abs() < 1e-14);
            assert!((set.nearest(p).dist(p) - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn box_interior_has_negative_signed_distance() {
        let set = BoundarySet::new(vec![Primitive::Box(Aabb::square(Point::new(0.0, 0.0), 1.0))]);
        assert!((set.signed_distance(Point::new(0.25, 0.5)) + 0.25).abs() < 1e-15);
        assert_eq!(set.distance(Point::new(0.25, 0.5)), 0.0);
        assert!((set.distance(Point::new(2.0, 0.5)) - 1.0).abs() < 1e-15);
    }
}
