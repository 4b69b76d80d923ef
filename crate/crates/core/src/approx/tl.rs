use rayon::prelude::*;
use serde::Serialize;

use super::params::NormParams;
use super::poly::{basis_array, basis_indices};
use crate::dyadic::{DyadicCube, Frame};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Domain, Point};
use crate::quadrature::TensorRule;
use crate::sum::compensated_sum;

/// Integration region for [`tl_norm`]. The lattice root is the smallest
/// square with the window's lower-left corner that contains it.
#[derive(Clone, Copy, Debug)]
pub enum TlRegion<'a> {
    Box(Aabb),
    /// The field is replaced by χ_G·f on the window.
    Domain { domain: &'a Domain, window: Aabb },
}

impl TlRegion<'_> {
    pub fn frame(&self) -> Frame {
        match self {
            TlRegion::Box(b) | TlRegion::Domain { window: b, .. } => Frame::from_box(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TlNorm {
    /// ‖f‖_p + ‖F‖_p.
    pub value: f64,
    pub lp_norm: f64,
    pub f_norm: f64,
    pub j_min: u32,
    pub j_max: u32,
}

/// Largest cell count accepted per axis exponent.
pub const MAX_TL_LEVEL: u32 = 11;

/// First level whose cube side is at most 1.
pub fn default_j_min(frame: &Frame) -> u32 {
    (0..64).find(|&j| frame.side_at(j) <= 1.0 + 1e-12).unwrap_or(0)
}

/// Discrete Triebel–Lizorkin surrogate ‖f‖_p + ‖F‖_p with
/// F(x)^q = ln 2·Σ_{j=j_min}^{j_max} (t_j^{−s} E_k(f, Q_j(x))_u)^q, t_j the side of Q_j(x).
///
/// All cubes are integrated with the finest-level composite Gauss rule.
pub fn tl_norm(
    f: &(dyn Fn(Point) -> f64 + Sync),
    params: &NormParams,
    region: &TlRegion,
    j_min: u32,
    j_max: u32,
) -> Result<TlNorm> {
    params.validate()?;
    if j_min > j_max {
        return Err(Error::Parameter(format!("j_min = {j_min} exceeds j_max = {j_max}")));
    }
    if j_max > MAX_TL_LEVEL {
        return Err(Error::ResourceLimit(format!("j_max = {j_max} exceeds {MAX_TL_LEVEL}")));
    }
    let frame = region.frame();
    let n = 1usize << j_max;
    let rule = TensorRule::new(params.order, 0);
    let g2 = rule.nodes.len();
    let h = frame.side_at(j_max);
    let domain = match region {
        TlRegion::Domain { domain, .. } => Some(*domain),
        TlRegion::Box(_) => None,
    };

    let mut vals = vec![0.0; n * n * g2];
    let stats: Vec<(usize, usize)> = vals
        .par_chunks_mut(n * g2)
        .enumerate()
        .map(|(cy, row)| {
            let (mut mixed, mut inside_nodes) = (0, 0);
            for cx in 0..n {
                let b = frame.cube_box(&DyadicCube::new(j_max, cx as i64, cy as i64));
                let mut cnt = 0;
                for (i, (p, _)) in rule.on_box(&b).enumerate() {
                    let keep = domain.is_none_or(|d| d.inside(p));
                    if keep {
                        cnt += 1;
                        row[cx * g2 + i] = f(p);
                    }
                }
                if cnt > 0 && cnt < g2 {
                    mixed += 1;
                }
                inside_nodes += cnt;
            }
            (mixed, inside_nodes)
        })
        .collect();
    if domain.is_some() {
        let mixed: usize = stats.iter().map(|s| s.0).sum();
        let inside: usize = stats.iter().map(|s| s.1).sum();
        let inside_cells = inside as f64 / g2 as f64;
        if inside == 0 || mixed as f64 > 0.5 * inside_cells {
            return Err(Error::Resolution(format!(
                "{mixed} of {inside_cells:.0} cells straddle the boundary at level {j_max}"
            )));
        }
    }

    let p = params.p;
    let cell_area = h * h;
    let row_sums: Vec<f64> = vals
        .par_chunks(n * g2)
        .map(|row| {
            compensated_sum(row.chunks(g2).flat_map(|c| c.iter().zip(&rule.nodes).map(|(v, nd)| nd.2 * v.abs().powf(p))))
        })
        .collect();
    let lp_norm = (cell_area * compensated_sum(row_sums)).powf(1.0 / p);
    if lp_norm == 0.0 && vals.iter().all(|v| *v == 0.0) {
        return Ok(TlNorm { value: 0.0, lp_norm: 0.0, f_norm: 0.0, j_min, j_max });
    }

    let q = params.q;
    let k = params.k;
    let u = params.u;
    let nb = basis_indices(k).len();
    let mut acc = vec![0.0f64; n * n];
    let nodes: &[(f64, f64, f64)] = &rule.nodes;
    let vals = &vals;
    for j in j_min..=j_max {
        let m = 1usize << (j_max - j);
        let t = frame.side_at(j);
        let scale = t.powf(-params.s);
        let inv_m2 = 1.0 / (m * m) as f64;
        acc.par_chunks_mut(n * m).enumerate().for_each(|(b, acc_rows)| {
            for a in 0..(1usize << j) {
                let node_iter = || {
                    (0..m).flat_map(move |ry| {
                        (0..m).flat_map(move |rx| {
                            let cx = a * m + rx;
                            let cy = b * m + ry;
                            let base = (cy * n + cx) * g2;
                            nodes.iter().enumerate().map(move |(i, &(nu, nv, w))| {
                                let uu = 2.0 * (rx as f64 + 0.5 * (nu + 1.0)) / m as f64 - 1.0;
                                let vv = 2.0 * (ry as f64 + 0.5 * (nv + 1.0)) / m as f64 - 1.0;
                                (uu, vv, w * inv_m2, base + i)
                            })
                        })
                    })
                };
                if node_iter().all(|(_, _, _, idx)| vals[idx] == 0.0) {
                    continue;
                }
                let mut c = [0.0; super::poly::MAX_BASIS];
                for (uu, vv, w, idx) in node_iter() {
                    let bv = basis_array(k, uu, vv);
                    for i in 0..nb {
                        c[i] += w * vals[idx] * bv[i];
                    }
                }
                let mut e = 0.0f64;
                for (uu, vv, w, idx) in node_iter() {
                    let bv = basis_array(k, uu, vv);
                    let pv: f64 = (0..nb).map(|i| c[i] * bv[i]).sum();
                    let r = (vals[idx] - pv).abs();
                    if u.is_infinite() {
                        e = e.max(r);
                    } else {
                        e += w * r.powf(u);
                    }
                }
                if u.is_finite() {
                    e = e.powf(1.0 / u);
                }
                let term = scale * e;
                for ry in 0..m {
                    for rx in 0..m {
                        let cell = &mut acc_rows[ry * n + a * m + rx];
                        if q.is_infinite() {
                            *cell = cell.max(term);
                        } else {
                            *cell += std::f64::consts::LN_2 * term.powf(q);
                        }
                    }
                }
            }
        });
    }
    let fp: Vec<f64> = acc
        .par_chunks(n)
        .map(|row| {
            compensated_sum(row.iter().map(|&a| {
                let big_f = if q.is_infinite() { a } else { a.powf(1.0 / q) };
                big_f.powf(p)
            }))
        })
        .collect();
    let f_norm = (cell_area * compensated_sum(fp)).powf(1.0 / p);
    Ok(TlNorm { value: lp_norm + f_norm, lp_norm, f_norm, j_min, j_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::ScalarField;

    fn window() -> TlRegion<'static> {
        TlRegion::Box(Aabb::new(Point::new(-2.0, -2.0), Point::new(2.0, 2.0)))
    }

    #[test]
    fn zero_field() {
        let np = NormParams::new(0.5, 2.0, 2.0).unwrap();
        let r = tl_norm(&|_| 0.0, &np, &window(), 2, 5).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn constant_has_only_lp_part() {
        let np = NormParams::new(0.5, 2.0, 2.0).unwrap();
        let r = tl_norm(&|_| 1.0, &np, &window(), 2, 5).unwrap();
        assert!(r.f_norm < 1e-12);
        assert!((r.lp_norm - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bump_self_convergence() {
        let f = ScalarField::bump(Point::new(0.0, 0.0), 1.0);
        let ev = |x: Point| f.eval(x);
        for (s, q) in [(0.5, 2.0), (0.3, 3.0), (0.5, f64::INFINITY)] {
            let np = NormParams::new(s, 2.0, q).unwrap();
            let a = tl_norm(&ev, &np, &window(), 2, 6).unwrap().value;
            let b = tl_norm(&ev, &np, &window(), 2, 7).unwrap().value;
            assert!((a - b).abs() < 0.05 * b, "s={s} q={q}: {a} vs {b}");
        }
    }

    #[test]
    fn domain_region_masks_the_field() {
        let sq = crate::geometry::make_polygon_domain(&[
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
        ])
        .unwrap();
        let np = NormParams::new(0.3, 2.0, 2.0).unwrap();
        let reg = TlRegion::Domain { domain: &sq, window: Aabb::new(Point::new(-2.0, -2.0), Point::new(2.0, 2.0)) };
        let r = tl_norm(&|_| 1.0, &np, &reg, 2, 6).unwrap();
        assert!((r.lp_norm - 2.0).abs() < 1e-12);
        assert!(r.f_norm > 0.0);
        assert!(matches!(tl_norm(&|_| 1.0, &np, &reg, 0, 0), Err(Error::Resolution(_))));
    }
}
