use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::ball::{slope, BallDecomposition, BallIntegral, BallOptions};
use crate::geometry::{Aabb, BoundarySet, Point, SetOracle};
use crate::{Error, Result};

/// Default ratio_threshold: stand-in for the existential constant.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 10.0;

const PLANE: f64 = 2.0;

/// ∫_{B(x,r)} dist(y,E)^{s−n} dy together with its resolution diagnostics.
#[derive(Clone, Debug)]
pub struct AikawaIntegral {
    pub value: f64,
    pub diverged: bool,
    pub tail: f64,
    pub collar_measure: f64,
    pub level_sums: Vec<f64>,
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= PLANE) {
        return Err(Error::Parameter(format!("Aikawa exponent s must lie in (0, 2], got {s}")));
    }
    Ok(())
}

fn check_probe(set: &dyn SetOracle, x: Point, r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Parameter(format!("radius must be positive, got {r}")));
    }
    let tol = set.resolution().max(1e-9 * r);
    if set.distance(x) > tol {
        return Err(Error::Precondition(format!("probe ({}, {}) is not on the set", x.x, x.y)));
    }
    Ok(())
}

fn aikawa_from(d: &BallDecomposition, s: f64) -> AikawaIntegral {
    let BallIntegral { value, diverged, tail, level_sums, .. } = d.integrate(|t| t.powf(s - PLANE), 4);
    AikawaIntegral { value, diverged, tail, collar_measure: d.collar_measure, level_sums }
}

pub fn aikawa_integral(set: &dyn SetOracle, x: Point, r: f64, s: f64) -> Result<AikawaIntegral> {
    aikawa_integral_with(set, x, r, s, &BallOptions::default())
}

pub fn aikawa_integral_with(set: &dyn SetOracle, x: Point, r: f64, s: f64, opts: &BallOptions) -> Result<AikawaIntegral> {
    check_s(s)?;
    check_probe(set, x, r)?;
    Ok(aikawa_from(&BallDecomposition::new(set, x, r, opts), s))
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionRow {
    pub probe_id: usize,
    pub r: f64,
    pub s: f64,
    pub integral: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub set_id: String,
    pub probes: Vec<Point>,
    pub radii: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub rows: Vec<DimensionRow>,
    /// Per grid value: true when s is classified as admissible.
    pub admissible: Vec<bool>,
    /// Pooled growth exponent of the level sums, per grid value.
    pub growth: Vec<f64>,
    pub dim_estimate: f64,
    pub box_counting: Option<f64>,
    pub ratio_threshold: f64,
}

impl DimensionReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parameter(e.to_string()))?;
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Parameter(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parameter(e.to_string()))?;
        Ok(())
    }
}

/// Options for [`estimate_aikawa_dimension`].
#[derive(Clone, Debug)]
pub struct DimensionOptions {
    pub ratio_threshold: f64,
    pub ball: BallOptions,
    /// Coarse levels of each ball excluded from the growth fit.
    pub skip_levels: usize,
    /// Bisection tolerance below the first admissible grid value.
    pub tolerance: f64,
    /// Scales for the box-counting cross-check.
    pub box_scales: Vec<f64>,
    /// Smallest cell side as a multiple of the set resolution.
    pub resolution_factor: f64,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        Self {
            ratio_threshold: DEFAULT_RATIO_THRESHOLD,
            ball: BallOptions::default(),
            skip_levels: 5,
            tolerance: 1e-3,
            box_scales: Vec::new(),
            resolution_factor: 0.5,
        }
    }
}

struct Probe {
    id: usize,
    r: f64,
    ball: BallDecomposition,
}

struct Verdict {
    growth: f64,
    values: Vec<f64>,
    admissible: bool,
}

fn pooled_growth(probes: &[Probe], s: f64, skip: usize) -> f64 {
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for p in probes {
        let sums = p.ball.level_sums(|t| t.powf(s - PLANE));
        let pts: Vec<(f64, f64)> = sums
            .iter()
            .enumerate()
            .skip(skip)
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (i as f64, v.log2()))
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
        let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
        sxy += pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum::<f64>();
        sxx += pts.iter().map(|q| (q.0 - mx).powi(2)).sum::<f64>();
    }
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NEG_INFINITY
    }
}

fn judge(probes: &[Probe], s: f64, opts: &DimensionOptions) -> Verdict {
    let growth = pooled_growth(probes, s, opts.skip_levels);
    let rho = 2f64.powf(growth);
    let values: Vec<f64> = probes
        .iter()
        .map(|p| {
            if rho >= 1.0 {
                return f64::INFINITY;
            }
            let sums = p.ball.level_sums(|t| t.powf(s - PLANE));
            let last = sums.last().copied().unwrap_or(0.0);
            sums.iter().sum::<f64>() + last * rho / (1.0 - rho)
        })
        .collect();
    let ratios: Vec<f64> = probes.iter().zip(&values).map(|(p, v)| v / p.r.powf(s)).collect();
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let admissible = growth < 0.0 && hi.is_finite() && lo > 0.0 && hi / lo <= opts.ratio_threshold;
    Verdict { growth, values, admissible }
}

/// Estimates dim_A(E) as the smallest s whose Aikawa integrals stay
/// uniformly comparable to r^s over the probe balls.
/// `count` points of the set, spread evenly over its primitives.
pub fn boundary_probes(set: &BoundarySet, count: usize) -> Vec<Point> {
    let prims = set.primitives();
    let step = (prims.len() / count.max(1)).max(1);
    prims.iter().step_by(step).take(count).map(|p| set.nearest(p.bounds().center())).collect()
}

pub fn estimate_aikawa_dimension(
    set: &dyn SetOracle,
    set_id: &str,
    probes: &[Point],
    radii: &[f64],
    s_grid: &[f64],
    opts: &DimensionOptions,
) -> Result<DimensionReport> {
    if probes.is_empty() {
        return Err(Error::Parameter("dimension estimate needs at least one probe".into()));
    }
    if radii.is_empty() || s_grid.is_empty() {
        return Err(Error::Parameter("radii and s grid must be nonempty".into()));
    }
    let mut grid = s_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    for &s in &grid {
        check_s(s)?;
    }
    for &x in probes {
        for &r in radii {
            check_probe(set, x, r)?;
        }
    }
    let jobs: Vec<(usize, Point, f64)> =
        probes.iter().enumerate().flat_map(|(i, &x)| radii.iter().map(move |&r| (i, x, r))).collect();
    let mut ball_opts = opts.ball;
    if ball_opts.min_side <= 0.0 {
        ball_opts.min_side = opts.resolution_factor * set.resolution();
    }
    let balls: Vec<Probe> = jobs
        .par_iter()
        .map(|&(id, x, r)| Probe { id, r, ball: BallDecomposition::new(set, x, r, &ball_opts) })
        .collect();

    let verdicts: Vec<Verdict> = grid.iter().map(|&s| judge(&balls, s, opts)).collect();
    let mut rows = Vec::with_capacity(grid.len() * balls.len());
    for (&s, v) in grid.iter().zip(&verdicts) {
        for (p, &val) in balls.iter().zip(&v.values) {
            rows.push(DimensionRow { probe_id: p.id, r: p.r, s, integral: val, ratio: val / p.r.powf(s) });
        }
    }
    let admissible: Vec<bool> = verdicts.iter().map(|v| v.admissible).collect();
    let first = admissible.partition_point(|a| !a);
    let dim_estimate = if first == 0 {
        grid[0]
    } else if first == grid.len() {
        PLANE
    } else {
        let (mut lo, mut hi) = (grid[first - 1], grid[first]);
        while hi - lo > opts.tolerance {
            let mid = 0.5 * (lo + hi);
            if judge(&balls, mid, opts).admissible {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let box_counting = if opts.box_scales.len() >= 2 { Some(box_counting_dimension(set, &opts.box_scales)) } else { None };
    Ok(DimensionReport {
        set_id: set_id.to_string(),
        probes: probes.to_vec(),
        radii: radii.to_vec(),
        s_grid: grid,
        rows,
        admissible,
        growth: verdicts.iter().map(|v| v.growth).collect(),
        dim_estimate,
        box_counting,
        ratio_threshold: opts.ratio_threshold,
    })
}

/// Slope of log N(h) against log(1/h), N(h) = grid cells of side h whose
/// interior meets the set; the grid is anchored at the set's lower-left corner.
pub fn box_counting_dimension(set: &dyn SetOracle, scales: &[f64]) -> f64 {
    let bb = set.bounds();
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .map(|&h| {
            let n = count_boxes(set, &bb, h);
            ((1.0 / h).ln(), (n as f64).ln())
        })
        .collect();
    slope(&pts)
}

fn count_boxes(set: &dyn SetOracle, bb: &Aabb, h: f64) -> usize {
    let nx = ((bb.width() / h).ceil() as i64).max(1);
    let ny = ((bb.height() / h).ceil() as i64).max(1);
    let shrink = 1e-9 * h;
    let mut stack: Vec<(i64, i64, i64, i64)> = vec![(0, 0, nx, ny)];
    let mut count = 0usize;
    while let Some((x0, y0, x1, y1)) = stack.pop() {
        let b = Aabb::new(
            Point::new(bb.min.x + x0 as f64 * h + shrink, bb.min.y + y0 as f64 * h + shrink),
            Point::new(bb.min.x + x1 as f64 * h - shrink, bb.min.y + y1 as f64 * h - shrink),
        );
        if set.distance_to_box(&b) > 0.0 {
            continue;
        }
        if x1 - x0 == 1 && y1 - y0 == 1 {
            count += 1;
            continue;
        }
        let (mx, my) = ((x0 + x1) / 2, (y0 + y1) / 2);
        for (a, b, c, d) in [(x0, y0, mx, my), (mx, y0, x1, my), (x0, my, mx, y1), (mx, my, x1, y1)] {
            if a < c && b < d {
                stack.push((a, b, c, d));
            }
        }
    }
    count
}

/// Writes a one-line JSON summary of the report.
pub fn write_dimension_summary(report: &DimensionReport, mut out: impl Write) -> Result<()> {
    let v = serde_json::json!({
        "set_id": report.set_id,
        "dim_estimate": report.dim_estimate,
        "box_counting": report.box_counting,
        "ratio_threshold": report.ratio_threshold,
    });
    writeln!(out, "{v}").map_err(|e| Error::Parameter(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoundarySet, Primitive};
    use std::f64::consts::PI;

    fn point_set() -> BoundarySet {
        BoundarySet::new(vec![Primitive::Point(Point::new(0.0, 0.0))])
    }

    #[test]
    fn point_closed_form() {
        let e = point_set();
        for s in [0.5, 1.0, 1.5] {
            for r in [0.25, 1.0] {
                let v = aikawa_integral(&e, Point::new(0.0, 0.0), r, s).unwrap().value;
                let exact = 2.0 * PI * r.powf(s) / s;
                assert!((v / exact - 1.0).abs() < 0.01, "s={s} r={r} {v} {exact}");
            }
        }
    }

    #[test]
    fn full_exponent_is_lebesgue_measure() {
        let v = aikawa_integral(&point_set(), Point::new(0.0, 0.0), 0.5, 2.0).unwrap().value;
        assert!((v / (PI * 0.25) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn line_diverges_below_one() {
        let line = BoundarySet::new(vec![Primitive::Segment(Point::new(-4.0, 0.0), Point::new(4.0, 0.0))]);
        let out = aikawa_integral(&line, Point::new(0.0, 0.0), 1.0, 0.5).unwrap();
        assert!(out.diverged);
        let ok = aikawa_integral(&line, Point::new(0.0, 0.0), 1.0, 1.5).unwrap();
        assert!(!ok.diverged && ok.value.is_finite());
    }

    #[test]
    fn bad_exponent_rejected() {
        let e = point_set();
        assert!(matches!(aikawa_integral(&e, Point::new(0.0, 0.0), 1.0, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(aikawa_integral(&e, Point::new(0.0, 0.0), 1.0, 2.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn increasing_in_radius() {
        let e = point_set();
        let a = aikawa_integral(&e, Point::new(0.0, 0.0), 0.3, 1.0).unwrap().value;
        let b = aikawa_integral(&e, Point::new(0.0, 0.0), 0.6, 1.0).unwrap().value;
        assert!(b > a);
    }

    #[test]
    fn point_dimension_is_zero() {
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
        let rep = estimate_aikawa_dimension(
            &point_set(),
            "point",
            &[Point::new(0.0, 0.0)],
            &[0.25, 0.5, 1.0],
            &grid,
            &DimensionOptions::default(),
        )
        .unwrap();
        assert!(rep.dim_estimate <= 0.1, "{}", rep.dim_estimate);
    }

    #[test]
    fn empty_probes_rejected() {
        let r = estimate_aikawa_dimension(&point_set(), "p", &[], &[1.0], &[1.0], &DimensionOptions::default());
        assert!(matches!(r, Err(Error::Parameter(_))));
    }
}
