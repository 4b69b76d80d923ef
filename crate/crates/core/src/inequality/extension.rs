use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::hardy::CoverNodes;
use crate::approx::{frac_seminorm, tl_norm, FracOptions, NormParams, ScalarField, TlRegion};
use crate::dyadic::{whitney_cover, whitney_cover_of_exterior, DyadicCube, Frame, WhitneyCover};
use crate::geometry::{Aabb, Domain, Point, SetOracle};
use crate::quadrature::{gauss_1d, TensorRule};
use crate::sum::compensated_sum;
use crate::{Error, Result};

/// Terms of |E₀f|^p_{W^{s,p}(ℝ²)} split as interior + 2∫_G |f|^p T.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZeroExtension {
    pub ext_seminorm_p: f64,
    pub interior_seminorm_p: f64,
    /// ∫_G |f|^p dist^{−sp} over the Whitney cubes.
    pub hardy_term_p: f64,
    /// 2∫_G |f|^p T over the same nodes.
    pub tail_term_p: f64,
    /// T(x) ≤ 2π dist(x)^{−sp}/(sp) at every node.
    pub tail_bound_ok: bool,
    /// max over nodes of T(x) / (2π dist(x)^{−sp}/(sp)).
    pub worst_tail_ratio: f64,
}

impl ZeroExtension {
    /// interior + 2·(2π/(sp))·hardy term, an upper bound for ext_seminorm_p.
    pub fn hardy_bound(&self, s: f64, p: f64) -> f64 {
        self.interior_seminorm_p + 2.0 * (TAU / (s * p)) * self.hardy_term_p
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExtensionOptions {
    pub j_max: u32,
    /// Extra exterior levels beyond `j_max`.
    pub exterior_extra: u32,
    /// Exterior frame side as a multiple of the interior frame side.
    pub exterior_scale: f64,
    /// Tree nodes farther than eta·size are replaced by their children's centroids.
    pub eta: f64,
    pub frac: FracOptions,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self { j_max: 6, exterior_extra: 2, exterior_scale: 3.0, eta: 4.0, frac: FracOptions::default() }
    }
}

struct Leaf {
    bx: Aabb,
    nodes: Vec<(Point, f64)>,
    collar: bool,
}

struct Exterior {
    frame: Frame,
    leaves: Vec<Leaf>,
    leaf_of: HashMap<DyadicCube, usize>,
    /// (mass, mass-weighted centroid) per tree node.
    mass: HashMap<DyadicCube, (f64, Point)>,
}

impl Exterior {
    fn new(domain: &Domain, frame: Frame, j_max: u32) -> Result<Self> {
        let cover = whitney_cover_of_exterior(domain, frame, j_max)?;
        let rule = TensorRule::new(4, 0);
        let mut cells: Vec<(DyadicCube, bool)> = cover.cubes.iter().map(|c| (c.cube, false)).collect();
        cells.extend(cover.collar.iter().map(|&c| (c, true)));
        let leaves: Vec<Leaf> = cells
            .par_iter()
            .map(|&(c, collar)| {
                let bx = frame.cube_box(&c);
                let nodes = rule.on_box(&bx).filter(|&(y, _)| !collar || !domain.inside(y)).collect();
                Leaf { bx, nodes, collar }
            })
            .collect();
        let mut leaf_of = HashMap::with_capacity(cells.len());
        let mut mass: HashMap<DyadicCube, (f64, Point)> = HashMap::new();
        for (i, (&(c, _), leaf)) in cells.iter().zip(&leaves).enumerate() {
            leaf_of.insert(c, i);
            let m: f64 = leaf.nodes.iter().map(|n| n.1).sum();
            if m <= 0.0 {
                continue;
            }
            let cx = leaf.nodes.iter().map(|n| n.0.x * n.1).sum::<f64>();
            let cy = leaf.nodes.iter().map(|n| n.0.y * n.1).sum::<f64>();
            let mut cur = Some(c);
            while let Some(q) = cur {
                let e = mass.entry(q).or_insert((0.0, Point::new(0.0, 0.0)));
                e.0 += m;
                e.1 = Point::new(e.1.x + cx, e.1.y + cy);
                cur = q.parent();
            }
        }
        for v in mass.values_mut() {
            v.1 = v.1 * (1.0 / v.0);
        }
        Ok(Self { frame, leaves, leaf_of, mass })
    }

    /// ∫_{frame ∖ G} |x − y|^{−kappa} dy.
    fn near(&self, x: Point, kappa: f64, eta: f64) -> f64 {
        let mut acc = Vec::new();
        let mut stack = vec![DyadicCube::ROOT];
        while let Some(c) = stack.pop() {
            if !self.mass.contains_key(&c) {
                continue;
            }
            if let Some(&i) = self.leaf_of.get(&c) {
                acc.push(leaf_integral(&self.leaves[i], x, kappa));
                continue;
            }
            let bx = self.frame.cube_box(&c);
            if bx.dist_to_point(x) >= eta * bx.width() {
                for ch in c.children() {
                    if let Some(&(m, y)) = self.mass.get(&ch) {
                        acc.push(m * x.dist(y).powf(-kappa));
                    }
                }
            } else {
                stack.extend(c.children());
            }
        }
        compensated_sum(acc)
    }
}

fn leaf_integral(leaf: &Leaf, x: Point, kappa: f64) -> f64 {
    if leaf.bx.dist_to_point(x) >= leaf.bx.width() || !leaf.collar {
        return leaf.nodes.iter().map(|&(y, w)| w * x.dist(y).powf(-kappa)).sum();
    }
    // collar cell next to x: refine its indicator nodes
    let (mut sum, depth) = (0.0, 3);
    let inside: Vec<Point> = leaf.nodes.iter().map(|n| n.0).collect();
    let rule = TensorRule::new(4, depth);
    let keep = |y: Point| inside.iter().any(|q| q.dist(y) <= 0.5 * leaf.bx.diameter());
    for (y, w) in rule.on_box(&leaf.bx) {
        if keep(y) && y.dist(x) > 0.0 {
            sum += w * x.dist(y).powf(-kappa);
        }
    }
    let full: f64 = rule.on_box(&leaf.bx).map(|(_, w)| w).sum();
    let kept: f64 = rule.on_box(&leaf.bx).filter(|&(y, _)| keep(y)).map(|(_, w)| w).sum();
    let m: f64 = leaf.nodes.iter().map(|n| n.1).sum();
    if kept > 0.0 {
        sum * (m / kept).min(full / kept)
    } else {
        0.0
    }
}

/// ∫_{ℝ² ∖ F} |x − y|^{−2−sp} dy = (1/sp)∫ ρ(θ)^{−sp} dθ for x inside the square F.
pub fn frame_tail(x: Point, frame: &Aabb, sp: f64) -> f64 {
    let exit = |t: f64| {
        let (dx, dy) = (t.cos(), t.sin());
        let tx = if dx > 0.0 {
            (frame.max.x - x.x) / dx
        } else if dx < 0.0 {
            (frame.min.x - x.x) / dx
        } else {
            f64::INFINITY
        };
        let ty = if dy > 0.0 {
            (frame.max.y - x.y) / dy
        } else if dy < 0.0 {
            (frame.min.y - x.y) / dy
        } else {
            f64::INFINITY
        };
        tx.min(ty)
    };
    let mut cuts: Vec<f64> = [frame.min, frame.max, Point::new(frame.min.x, frame.max.y), Point::new(frame.max.x, frame.min.y)]
        .iter()
        .map(|c| (c.y - x.y).atan2(c.x - x.x).rem_euclid(TAU))
        .collect();
    cuts.push(0.0);
    cuts.push(TAU);
    cuts.sort_by(f64::total_cmp);
    let total: f64 = cuts.windows(2).map(|w| gauss_1d(|t| exit(t).powf(-sp), w[0], w[1], 8, 4)).sum();
    total / sp
}

/// Precomputed geometry for zero-extension checks of many functions.
pub struct ExtensionContext<'a> {
    domain: &'a Domain,
    pub s: f64,
    pub p: f64,
    pub cover: WhitneyCover,
    nodes: CoverNodes,
    /// T at each Whitney node.
    pub tail: Vec<f64>,
    pub worst_tail_ratio: f64,
    opts: ExtensionOptions,
}

impl<'a> ExtensionContext<'a> {
    pub fn new(domain: &'a Domain, s: f64, p: f64, opts: ExtensionOptions) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Parameter(format!("zero extension needs 0 < s < 1, got {s}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p = {p} must lie in [1, ∞)")));
        }
        if !domain.is_bounded() {
            return Err(Error::Precondition("zero extension is implemented for bounded domains".into()));
        }
        let cover = whitney_cover(domain, opts.j_max)?;
        let nodes = CoverNodes::new(domain, &cover, 4);
        let inner = cover.frame.root_box();
        let side = opts.exterior_scale * cover.frame.side;
        let c = inner.center();
        let ext_frame = Frame::new(Point::new(c.x - 0.5 * side, c.y - 0.5 * side), side);
        let levels = opts.j_max + opts.exterior_extra + (opts.exterior_scale.log2().ceil().max(0.0) as u32);
        let exterior = Exterior::new(domain, ext_frame, levels)?;
        let sp = s * p;
        let outer = ext_frame.root_box();
        let tail: Vec<f64> = nodes
            .whitney
            .par_iter()
            .map(|&(x, _, _)| exterior.near(x, 2.0 + sp, opts.eta) + frame_tail(x, &outer, sp))
            .collect();
        let worst_tail_ratio = nodes
            .whitney
            .iter()
            .zip(&tail)
            .map(|(&(_, d, _), &t)| t / (TAU * d.powf(-sp) / sp))
            .fold(0.0, f64::max);
        Ok(Self { domain, s, p, cover, nodes, tail, worst_tail_ratio, opts })
    }

    pub fn tail_bound_ok(&self) -> bool {
        self.worst_tail_ratio <= 1.0
    }

    pub fn check(&self, f: &ScalarField) -> Result<ZeroExtension> {
        let g = |x: Point| f.eval(x);
        let (s, p) = (self.s, self.p);
        let interior = frac_seminorm(&g, self.domain, &self.cover, s, p, self.opts.frac)?.integral;
        let terms: Vec<(f64, f64)> = self
            .nodes
            .whitney
            .par_iter()
            .zip(self.tail.par_iter())
            .map(|(&(x, d, w), &t)| {
                let a = w * g(x).abs().powf(p);
                (a * d.powf(-s * p), a * t)
            })
            .collect();
        let hardy = compensated_sum(terms.iter().map(|t| t.0));
        let tail = 2.0 * compensated_sum(terms.iter().map(|t| t.1));
        Ok(ZeroExtension {
            ext_seminorm_p: interior + tail,
            interior_seminorm_p: interior,
            hardy_term_p: hardy,
            tail_term_p: tail,
            tail_bound_ok: self.tail_bound_ok(),
            worst_tail_ratio: self.worst_tail_ratio,
        })
    }
}

/// `n` bumps with centres uniform in the bounding box and radii in
/// [0.1, 0.4]·diam. Deterministic in `seed`.
pub fn extension_corpus(domain: &Domain, n: usize, seed: u64) -> Vec<ScalarField> {
    use rand::{Rng, SeedableRng};
    let bb = domain.bounding_box();
    let diam = bb.diameter();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c = Point::new(bb.min.x + rng.gen::<f64>() * bb.width(), bb.min.y + rng.gen::<f64>() * bb.height());
            ScalarField::bump(c, rng.gen_range(0.1..0.4) * diam)
        })
        .collect()
}

/// `n` bumps centred on ∂G with radii in [0.05, 0.2]·diam ∂G.
pub fn straddling_corpus(domain: &Domain, n: usize, seed: u64) -> Vec<ScalarField> {
    use rand::{Rng, SeedableRng};
    let bb = domain.boundary().bounds();
    let diam = bb.diameter();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let probe = Point::new(bb.min.x + rng.gen::<f64>() * bb.width(), bb.min.y + rng.gen::<f64>() * bb.height());
            ScalarField::bump(domain.boundary().nearest(probe), rng.gen_range(0.05..0.2) * diam)
        })
        .collect()
}

pub fn zero_extension_check(f: &ScalarField, domain: &Domain, s: f64, p: f64) -> Result<ZeroExtension> {
    ExtensionContext::new(domain, s, p, ExtensionOptions::default())?.check(f)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierReport {
    pub ratio: f64,
    pub tl_f: f64,
    pub tl_chi_f: f64,
    pub lp_norm: f64,
    /// (∫_G |f|^p dist^{−sp})^{1/p} on the window's Whitney cubes.
    pub hardy_term: f64,
    pub warning: Option<String>,
}

/// tl_norm(χ_G f) / tl_norm(f) on a square window around supp f.
pub fn multiplier_ratio(
    f: &ScalarField,
    domain: &Domain,
    params: &NormParams,
    j_max: u32,
    porosity: Option<f64>,
) -> Result<MultiplierReport> {
    let supp = f.support().filter(|b| b.area() > 0.0).ok_or_else(|| Error::Undefined("f vanishes; ratio undefined".into()))?;
    let side = 1.25 * supp.width().max(supp.height());
    let c = supp.center();
    let window = Aabb::centered(c, 0.5 * side);
    let g = |x: Point| f.eval(x);
    let frame = Frame::from_box(&window);
    let j_min = crate::approx::default_j_min(&frame).min(j_max);
    let plain = tl_norm(&g, params, &TlRegion::Box(window), j_min, j_max)?;
    if plain.value == 0.0 {
        return Err(Error::Undefined("f vanishes; ratio undefined".into()));
    }
    let masked = tl_norm(&g, params, &TlRegion::Domain { domain, window }, j_min, j_max)?;
    let cover = crate::dyadic::whitney_cover_in_frame(domain, frame, j_max)?;
    let nodes = CoverNodes::new(domain, &cover, 4);
    let sp = params.s * params.p;
    let hardy = compensated_sum(nodes.whitney.iter().map(|&(x, d, w)| w * g(x).abs().powf(params.p) * d.powf(-sp)));
    let warning = match porosity {
        Some(_) => None,
        None => Some("porosity of the boundary not established; boundedness of the ratio is not guaranteed".into()),
    };
    Ok(MultiplierReport {
        ratio: masked.value / plain.value,
        tl_f: plain.value,
        tl_chi_f: masked.value,
        lp_norm: plain.lp_norm,
        hardy_term: hardy.powf(1.0 / params.p),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_polygon_domain;

    fn disc(n: usize) -> Domain {
        let v: Vec<Point> = (0..n).map(|k| {
            let t = TAU * k as f64 / n as f64;
            Point::new(t.cos(), t.sin())
        })
        .collect();
        make_polygon_domain(&v).unwrap()
    }

    #[test]
    fn frame_tail_of_centred_square() {
        // ∫_{|y|>a} |y|^{-2-sp} ≤ T ≤ ∫_{|y|>a√2}; check against direct radial quadrature
        let b = Aabb::centered(Point::new(0.0, 0.0), 1.0);
        let sp = 0.6;
        let t = frame_tail(Point::new(0.0, 0.0), &b, sp);
        let lo = TAU * 2f64.sqrt().powf(-sp) / sp;
        let hi = TAU / sp;
        assert!(t > lo && t < hi);
        let radial = gauss_1d(|th| (1.0 / th.cos().abs().max(th.sin().abs())).powf(-sp), 0.0, TAU, 16, 16) / sp;
        assert!((t / radial - 1.0).abs() < 1e-6);
    }

    #[test]
    fn disc_tail_matches_closed_form() {
        let g = disc(256);
        let opts = ExtensionOptions { j_max: 4, ..Default::default() };
        let ctx = ExtensionContext::new(&g, 0.3, 2.0, opts).unwrap();
        let near_centre = ctx
            .nodes
            .whitney
            .iter()
            .zip(&ctx.tail)
            .min_by(|a, b| a.0 .0.norm().total_cmp(&b.0 .0.norm()))
            .unwrap();
        let x = near_centre.0 .0;
        let sp = 0.6;
        // T for the exact unit disc at x, by radial quadrature
        let exact = gauss_1d(
            |th| {
                let (c, s) = (th.cos(), th.sin());
                let b = x.x * c + x.y * s;
                let rho = -b + (b * b - x.dot(x) + 1.0).sqrt();
                rho.powf(-sp)
            },
            0.0,
            TAU,
            16,
            16,
        ) / sp;
        assert!((near_centre.1 / exact - 1.0).abs() < 0.01, "{} vs {exact}", near_centre.1);
        assert!(ctx.tail_bound_ok());
    }

    #[test]
    fn zero_function_terms_vanish() {
        let g = disc(32);
        let opts = ExtensionOptions { j_max: 4, ..Default::default() };
        let z = ExtensionContext::new(&g, 0.3, 2.0, opts).unwrap().check(&ScalarField::Zero).unwrap();
        assert_eq!(z.ext_seminorm_p, 0.0);
        assert_eq!(z.hardy_term_p, 0.0);
    }

    #[test]
    fn s_one_out_of_scope() {
        let g = disc(16);
        assert!(matches!(zero_extension_check(&ScalarField::Zero, &g, 1.0, 2.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn interior_support_gives_unit_multiplier() {
        let g = disc(64);
        let f = ScalarField::bump(Point::new(0.1, 0.0), 0.3);
        let params = NormParams::new(0.3, 2.0, 2.0).unwrap();
        let rep = multiplier_ratio(&f, &g, &params, 6, Some(4.0)).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-12);
        assert!(rep.warning.is_none());
        assert!(matches!(multiplier_ratio(&ScalarField::Zero, &g, &params, 6, None), Err(Error::Undefined(_))));
    }
}
