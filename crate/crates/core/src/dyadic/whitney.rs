use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{DyadicCube, Frame};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// Q* = (9/8)Q.
pub const DILATION: f64 = 9.0 / 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoverCube {
    pub cube: DyadicCube,
    /// dist(x_Q, ∂G) in world units.
    pub dist_center: f64,
}

/// Whitney cubes of G truncated at level `j_max`: the maximal dyadic cubes
/// with diam(Q) ≤ dist(Q, ∂G), which then also satisfy dist(Q, ∂G) < 4·diam(Q).
/// Level-`j_max` cells that meet G but were not selected form the collar.
#[derive(Clone, Debug)]
pub struct WhitneyCover {
    pub frame: Frame,
    pub j_max: u32,
    /// Sorted by (level, ix, iy).
    pub cubes: Vec<CoverCube>,
    /// Unresolved level-`j_max` cells meeting G (or ∂G), sorted.
    pub collar: Vec<DyadicCube>,
    /// Total area of the Whitney cubes.
    pub resolved_measure: f64,
    /// Total area of the collar cells (an upper bound for the unresolved part of G).
    pub collar_measure: f64,
    /// Every point of the frame in G with dist > `coverage_constant·2^(−j_max)`
    /// (lattice units) lies in a cube of the cover.
    pub coverage_constant: f64,
    index: HashMap<DyadicCube, usize>,
}

impl WhitneyCover {
    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn index_of(&self, c: &DyadicCube) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn contains(&self, c: &DyadicCube) -> bool {
        self.index.contains_key(c)
    }

    /// World side length ℓ(Q).
    pub fn side(&self, c: &DyadicCube) -> f64 {
        self.frame.side_at(c.level)
    }

    /// Cube of the cover containing `p`, if any.
    pub fn locate(&self, p: Point) -> Option<usize> {
        (0..=self.j_max).find_map(|l| self.index_of(&self.frame.locate(p, l)))
    }

    /// Distinct levels present, ascending.
    pub fn levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.cubes.iter().map(|c| c.cube.level).collect();
        v.dedup();
        v
    }

    /// Indices of cover cubes whose dilated cubes Q* overlap that of cube `i`
    /// with positive area (excluding `i`).
    pub fn dilated_neighbors(&self, i: usize) -> Vec<usize> {
        let q = self.cubes[i].cube;
        let qs = self.frame.cube_box(&q).dilate(DILATION);
        let mut out = Vec::new();
        for l in self.levels() {
            let lo = self.frame.locate(qs.min, l);
            let hi = self.frame.locate(qs.max, l);
            // Limit the scan to plausible neighbour sizes.
            if (hi.ix - lo.ix + 1) * (hi.iy - lo.iy + 1) > 4096 {
                continue;
            }
            for iy in lo.iy..=hi.iy {
                for ix in lo.ix..=hi.ix {
                    let c = DyadicCube::new(l, ix, iy);
                    if c == q {
                        continue;
                    }
                    if let Some(j) = self.index_of(&c) {
                        let cs = self.frame.cube_box(&c).dilate(DILATION);
                        if cs.overlap_area(&qs) > 0.0 {
                            out.push(j);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// CSV export with columns `level,index_x,index_y,dist_center`.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["level", "index_x", "index_y", "dist_center"])?;
        for c in &self.cubes {
            wr.write_record(&[
                c.cube.level.to_string(),
                c.cube.ix.to_string(),
                c.cube.iy.to_string(),
                format!("{:.17e}", c.dist_center),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Whitney cover of `domain` on its default frame.
pub fn whitney_cover(domain: &Domain, j_max: u32) -> Result<WhitneyCover> {
    build_cover(domain, Frame::for_domain(domain), j_max, true)
}

/// Whitney cover of `domain` on an explicit frame.
pub fn whitney_cover_in_frame(domain: &Domain, frame: Frame, j_max: u32) -> Result<WhitneyCover> {
    build_cover(domain, frame, j_max, true)
}

/// Whitney cover of frame ∖ Ḡ (the exterior side of ∂G inside `frame`).
pub fn whitney_cover_of_exterior(domain: &Domain, frame: Frame, j_max: u32) -> Result<WhitneyCover> {
    build_cover(domain, frame, j_max, false)
}

fn build_cover(domain: &Domain, frame: Frame, j_max: u32, want_inside: bool) -> Result<WhitneyCover> {
    if j_max > 30 {
        return Err(Error::ResourceLimit(format!("j_max = {j_max} exceeds 30")));
    }
    let mut cubes = Vec::new();
    let mut collar = Vec::new();
    let mut stack = vec![DyadicCube::ROOT];
    while let Some(q) = stack.pop() {
        let b = frame.cube_box(&q);
        let dq = domain.boundary_distance_to_box(&b);
        if dq > 0.0 {
            // Q misses ∂G, so it lies on one side
            let x = frame.center(&q);
            if domain.inside(x) != want_inside {
                continue;
            }
            if dq >= b.diameter() {
                cubes.push(CoverCube { cube: q, dist_center: domain.boundary_distance(x).0 });
                continue;
            }
        }
        if q.level >= j_max {
            collar.push(q);
        } else {
            stack.extend(q.children());
        }
    }
    if cubes.is_empty() {
        return Err(Error::Resolution(format!(
            "no Whitney cube found down to level {j_max}; refine j_max"
        )));
    }
    cubes.sort_by_key(|c| c.cube);
    collar.sort();
    let index = cubes.iter().enumerate().map(|(i, c)| (c.cube, i)).collect();
    let resolved_measure = crate::sum::compensated_sum(cubes.iter().map(|c| frame.side_at(c.cube.level).powi(2)));
    let collar_measure = collar.len() as f64 * frame.side_at(j_max).powi(2);
    Ok(WhitneyCover {
        frame,
        j_max,
        cubes,
        collar,
        resolved_measure,
        collar_measure,
        coverage_constant: 2.0 * std::f64::consts::SQRT_2,
        index,
    })
}

/// Post-hoc check of the two-sided distance bound on dilated cubes,
/// their bounded overlap and pairwise disjointness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WhitneyReport {
    pub cubes: usize,
    /// min over sampled x ∈ Q* of dist(x,∂G)/diam(Q).
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Cubes with at least one sample outside [3/4, 6].
    pub violations: usize,
    /// `overlap_histogram[k]` = number of probe points lying in exactly k dilated cubes.
    pub overlap_histogram: Vec<usize>,
    pub max_overlap: usize,
    pub disjoint: bool,
}

impl WhitneyReport {
    pub fn passes(&self) -> bool {
        self.violations == 0 && self.disjoint
    }
}

/// Sample `samples_per_cube` points in each Q* and `overlap_points` points in
/// the frame; the result is deterministic in `seed`.
pub fn verify_whitney(
    cover: &WhitneyCover,
    domain: &Domain,
    samples_per_cube: usize,
    overlap_points: usize,
    seed: u64,
) -> WhitneyReport {
    let frame = cover.frame;
    let per_cube: Vec<(f64, f64)> = cover
        .cubes
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let b = frame.cube_box(&c.cube).dilate(DILATION);
            let diam = b.diameter() / DILATION;
            let mut lo = f64::INFINITY;
            let mut hi: f64 = 0.0;
            for _ in 0..samples_per_cube {
                let p = Point::new(rng.gen_range(b.min.x..=b.max.x), rng.gen_range(b.min.y..=b.max.y));
                let r = domain.boundary_distance(p).0 / diam;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            (lo, hi)
        })
        .collect();
    let violations = per_cube.iter().filter(|(lo, hi)| *lo < 0.75 || *hi > 6.0).count();
    let min_ratio = per_cube.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let max_ratio = per_cube.iter().map(|r| r.1).fold(0.0, f64::max);

    let levels = cover.levels();
    let root = frame.root_box();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let probes: Vec<Point> = (0..overlap_points)
        .map(|_| Point::new(rng.gen_range(root.min.x..root.max.x), rng.gen_range(root.min.y..root.max.y)))
        .collect();
    let counts: Vec<usize> = probes
        .par_iter()
        .map(|&p| {
            let mut n = 0;
            for &l in &levels {
                let c = frame.locate(p, l);
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let q = DyadicCube::new(l, c.ix + dx, c.iy + dy);
                        if cover.contains(&q) && frame.cube_box(&q).dilate(DILATION).contains(p) {
                            n += 1;
                        }
                    }
                }
            }
            n
        })
        .collect();
    let max_overlap = counts.iter().copied().max().unwrap_or(0);
    let mut overlap_histogram = vec![0; max_overlap + 1];
    for c in counts {
        overlap_histogram[c] += 1;
    }
    let disjoint = cover.cubes.iter().all(|c| {
        let mut q = c.cube;
        while let Some(p) = q.parent() {
            if cover.contains(&p) {
                return false;
            }
            q = p;
        }
        true
    });
    WhitneyReport {
        cubes: cover.len(),
        min_ratio,
        max_ratio,
        violations,
        overlap_histogram,
        max_overlap,
        disjoint,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_koch_snowflake, make_polygon_domain};

    fn unit_square() -> Domain {
        make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 1.), Point::new(0., 1.)]).unwrap()
    }

    #[test]
    fn unit_square_cover_is_valid() {
        let d = unit_square();
        let cover = whitney_cover(&d, 6).unwrap();
        let rep = verify_whitney(&cover, &d, 5, 10_000, 1);
        assert_eq!(rep.violations, 0, "{rep:?}");
        assert!(rep.min_ratio >= 0.75 && rep.max_ratio <= 6.0);
        assert!(rep.disjoint);
        assert!(rep.max_overlap <= 12);
    }

    #[test]
    fn unit_square_area_converges() {
        let d = unit_square();
        let a8 = whitney_cover(&d, 8).unwrap();
        // resolved + collar covers the whole square
        assert!((a8.resolved_measure + a8.collar_measure - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for j in 4..=10 {
            let m = whitney_cover(&d, j).unwrap().resolved_measure;
            assert!(m > prev);
            prev = m;
        }
        assert!(prev >= 0.99, "area at j_max = 10 is {prev}");
    }

    #[test]
    fn truncation_is_monotone() {
        let d = make_koch_snowflake(3).unwrap();
        let c6 = whitney_cover(&d, 6).unwrap();
        let c7 = whitney_cover(&d, 7).unwrap();
        for c in &c6.cubes {
            assert!(c7.contains(&c.cube));
        }
        assert_eq!(c7.cubes.iter().filter(|c| c.cube.level <= 6).count(), c6.len());
    }

    #[test]
    fn koch_cover_is_valid() {
        let d = make_koch_snowflake(4).unwrap();
        let cover = whitney_cover(&d, 8).unwrap();
        let rep = verify_whitney(&cover, &d, 5, 10_000, 2);
        assert!(rep.passes(), "{rep:?}");
        assert!(rep.max_overlap <= 12);
    }

    #[test]
    fn resolution_error_when_too_coarse() {
        let thin = make_polygon_domain(&[Point::new(0., 0.), Point::new(1., 0.), Point::new(1., 0.001), Point::new(0., 0.001)]).unwrap();
        assert!(matches!(whitney_cover(&thin, 3), Err(Error::Resolution(_))));
    }

    #[test]
    fn single_cube_cover_is_disjoint() {
        let d = unit_square();
        let frame = Frame::new(Point::new(0.4, 0.4), 0.05);
        let cover = whitney_cover_in_frame(&d, frame, 3).unwrap();
        assert_eq!(cover.len(), 1);
        assert!(verify_whitney(&cover, &d, 5, 100, 0).disjoint);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let d = unit_square();
        let cover = whitney_cover(&d, 3).unwrap();
        let mut buf = Vec::new();
        cover.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,index_x,index_y,dist_center\n"));
        assert_eq!(text.lines().count(), cover.len() + 1);
    }
}
