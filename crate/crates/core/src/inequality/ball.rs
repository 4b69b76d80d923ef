use rayon::prelude::*;

use crate::geometry::{Aabb, Point, SetOracle};
use crate::quadrature::TensorRule;
use crate::sum::compensated_sum;

/// Tuning for [`BallDecomposition`].
#[derive(Clone, Copy, Debug)]
pub struct BallOptions {
    /// A cell is integrated once dist(cell, E) ≥ kappa · diam(cell).
    pub kappa: f64,
    /// Gauss order per cell.
    pub order: usize,
    /// Deepest lattice level below the ball's bounding square.
    pub max_level: u32,
    /// Smallest admissible cell side (0: no limit).
    pub min_side: f64,
    /// Extra subdivision depth for cells cut by the sphere.
    pub sphere_depth: u32,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self { kappa: 1.0, order: 4, max_level: 16, min_side: 0.0, sphere_depth: 6 }
    }
}

/// Dyadic decomposition of B(c, r) ∖ E into cells well separated from E.
///
/// Each accepted cell keeps its Gauss nodes as (dist to E, weight) pairs, so
/// any radial-in-distance integrand can be re-evaluated without geometry.
#[derive(Clone, Debug)]
pub struct BallDecomposition {
    pub center: Point,
    pub radius: f64,
    levels: Vec<Vec<(f64, f64)>>,
    /// Area of the unresolved cells at the deepest level.
    pub collar_measure: f64,
    pub collar_cells: usize,
    /// Area lying inside the interior of E.
    pub interior_measure: f64,
}

/// Value of one integrand over a [`BallDecomposition`].
#[derive(Clone, Debug)]
pub struct BallIntegral {
    pub level_sums: Vec<f64>,
    pub partial: f64,
    pub tail: f64,
    /// Fitted ratio between successive level sums.
    pub ratio: f64,
    pub diverged: bool,
    /// partial + tail, or +∞ when diverged.
    pub value: f64,
}

enum Cell {
    Skip,
    Inside(f64),
    Accept(Vec<(f64, f64)>),
    Collar(f64),
    Split,
}

impl BallDecomposition {
    pub fn new(set: &dyn SetOracle, center: Point, radius: f64, opts: &BallOptions) -> Self {
        let rule = TensorRule::new(opts.order, 0);
        let side0 = 2.0 * radius;
        let min_side = opts.min_side;
        let mut depth = opts.max_level;
        if min_side > 0.0 {
            let fit = (side0 / min_side).log2().floor();
            depth = depth.min(fit.max(0.0) as u32);
        }
        let origin = Point::new(center.x - radius, center.y - radius);
        let mut levels = Vec::with_capacity(depth as usize + 1);
        let (mut collar_measure, mut collar_cells, mut interior_measure) = (0.0, 0usize, 0.0);
        let mut frontier: Vec<(i64, i64)> = vec![(0, 0)];
        for level in 0..=depth {
            let h = side0 * 0.5f64.powi(level as i32);
            let last = level == depth;
            let cells: Vec<Cell> = frontier
                .par_iter()
                .map(|&(ix, iy)| {
                    let b = Aabb::square(Point::new(origin.x + ix as f64 * h, origin.y + iy as f64 * h), h);
                    classify(set, &b, center, radius, opts, &rule, last)
                })
                .collect();
            let mut nodes = Vec::new();
            let mut next = Vec::new();
            for (&(ix, iy), cell) in frontier.iter().zip(cells) {
                match cell {
                    Cell::Skip => {}
                    Cell::Inside(a) => interior_measure += a,
                    Cell::Accept(v) => nodes.extend(v),
                    Cell::Collar(a) => {
                        collar_measure += a;
                        collar_cells += 1;
                    }
                    Cell::Split => {
                        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                            next.push((2 * ix + dx, 2 * iy + dy));
                        }
                    }
                }
            }
            levels.push(nodes);
            frontier = next;
        }
        Self { center, radius, levels, collar_measure, collar_cells, interior_measure }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// World side of the cells at `level`.
    pub fn side_at(&self, level: usize) -> f64 {
        2.0 * self.radius * 0.5f64.powi(level as i32)
    }

    /// Total Gauss nodes stored.
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Per-level sums of ∫ phi(dist(y, E)) dy.
    pub fn level_sums(&self, phi: impl Fn(f64) -> f64) -> Vec<f64> {
        self.levels
            .iter()
            .map(|nodes| compensated_sum(nodes.iter().map(|&(d, w)| w * phi(d))))
            .collect()
    }

    /// ∫ phi(dist(y, E)) over B ∖ E, with a geometric tail fitted on the last
    /// `fit` nonzero level sums.
    pub fn integrate(&self, phi: impl Fn(f64) -> f64, fit: usize) -> BallIntegral {
        let level_sums = self.level_sums(phi);
        let partial = compensated_sum(level_sums.iter().copied());
        let ratio = tail_ratio(&level_sums, fit);
        let last = level_sums.last().copied().unwrap_or(0.0);
        let diverged = ratio >= 1.0;
        let tail = if diverged || last <= 0.0 { 0.0 } else { last * ratio / (1.0 - ratio) };
        let value = if diverged { f64::INFINITY } else { partial + tail };
        BallIntegral { level_sums, partial, tail, ratio, diverged, value }
    }
}

/// Least-squares ratio of the trailing positive level sums (0 if too few).
pub(crate) fn tail_ratio(sums: &[f64], fit: usize) -> f64 {
    let start = sums.len().saturating_sub(fit.max(2));
    let pts: Vec<(f64, f64)> = sums[start..]
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, &v)| (i as f64, v.log2()))
        .collect();
    if pts.len() < 2 || sums.last().is_none_or(|&v| v <= 0.0) {
        return 0.0;
    }
    2f64.powf(slope(&pts))
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn classify(
    set: &dyn SetOracle,
    b: &Aabb,
    c: Point,
    r: f64,
    opts: &BallOptions,
    rule: &TensorRule,
    last: bool,
) -> Cell {
    if b.dist_to_point(c) >= r {
        return Cell::Skip;
    }
    let diam = b.diameter();
    if set.signed_distance(b.center()) <= -0.5 * diam {
        return Cell::Inside(b.area());
    }
    if set.distance_to_box(b) >= opts.kappa * diam {
        let mut out = Vec::with_capacity(rule.nodes.len());
        ball_nodes(set, b, c, r, rule, opts.sphere_depth, &mut out);
        return Cell::Accept(out);
    }
    if last {
        Cell::Collar(b.area())
    } else {
        Cell::Split
    }
}

fn ball_nodes(set: &dyn SetOracle, b: &Aabb, c: Point, r: f64, rule: &TensorRule, depth: u32, out: &mut Vec<(f64, f64)>) {
    if b.dist_to_point(c) >= r {
        return;
    }
    let inside = b.max_dist_to_point(c) <= r;
    if inside || depth == 0 {
        for (x, w) in rule.on_box(b) {
            if inside || x.dist(c) < r {
                out.push((set.distance(x), w));
            }
        }
        return;
    }
    let m = b.center();
    for q in [
        Aabb::new(b.min, m),
        Aabb::new(Point::new(m.x, b.min.y), Point::new(b.max.x, m.y)),
        Aabb::new(Point::new(b.min.x, m.y), Point::new(m.x, b.max.y)),
        Aabb::new(m, b.max),
    ] {
        ball_nodes(set, &q, c, r, rule, depth - 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundarySet, Primitive};
    use std::f64::consts::PI;

    fn origin() -> BoundarySet {
        BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))])
    }

    #[test]
    fn constant_integrand_gives_disc_area() {
        let d = BallDecomposition::new(&origin(), Point::new(0.0, 0.0), 0.7, &BallOptions::default());
        let v = d.integrate(|_| 1.0, 4).value;
        assert!((v / (PI * 0.49) - 1.0).abs() < 1e-4, "{v}");
    }

    #[test]
    fn point_level_sums_are_geometric() {
        let d = BallDecomposition::new(&origin(), Point::new(0.0, 0.0), 1.0, &BallOptions::default());
        let out = d.integrate(|t| t.powf(-1.0), 4);
        assert!((out.ratio - 0.5).abs() < 1e-6, "{}", out.ratio);
        assert!((out.value / (2.0 * PI) - 1.0).abs() < 1e-3);
    }
}
