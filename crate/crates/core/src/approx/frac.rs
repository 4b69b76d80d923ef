use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicCube, WhitneyCover};
use crate::error::{Error, Result};
use crate::geometry::{Aabb, Domain, Point};
use crate::quadrature::TensorRule;
use crate::sum::NeumaierSum;

/// Quadrature controls for [`frac_seminorm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FracOptions {
    /// Gauss nodes per axis on well-separated leaf pairs.
    pub order: usize,
    /// Gauss nodes per axis on sub-pairs of the near-field subdivision.
    pub near_order: usize,
    /// Subdivision depth for touching leaf pairs.
    pub near_depth: u32,
    /// Tree nodes at distance ≥ eta·size are replaced by aggregates.
    pub eta: f64,
}

impl Default for FracOptions {
    fn default() -> Self {
        Self { order: 4, near_order: 2, near_depth: 3, eta: 2.0 }
    }
}

/// ∬_{G×G} |f(x) − f(y)|^p / |x − y|^{n+sp} and its parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FracSeminorm {
    /// Double integral including the extrapolated core tail.
    pub integral: f64,
    /// Contribution of the excluded diagonal core (Richardson estimate).
    pub core_tail: f64,
    /// Truncated double integral at subdivision depth D and D − 1.
    pub truncated: f64,
    pub truncated_coarse: f64,
    pub leaves: usize,
    pub collar_leaves: usize,
}

impl FracSeminorm {
    /// |f|_{W^{s,p}} = integral^{1/p}.
    pub fn seminorm(&self, p: f64) -> f64 {
        self.integral.max(0.0).powf(1.0 / p)
    }
}

#[derive(Clone, Copy)]
struct Sample {
    x: Point,
    w: f64,
    f: f64,
}

struct Leaf {
    bbox: Aabb,
    collar: bool,
    samples: Vec<Sample>,
    fmin: f64,
    fmax: f64,
}

struct Rep {
    w: f64,
    c: Point,
    f: f64,
}

struct Node {
    bbox: Aabb,
    children: Vec<usize>,
    leaf: Option<usize>,
    fmin: f64,
    fmax: f64,
    reps: Vec<Rep>,
    agg: (f64, Point, f64),
}

struct Ctx<'a> {
    f: &'a (dyn Fn(Point) -> f64 + Sync),
    domain: &'a Domain,
    p: f64,
    kappa: f64,
    opts: FracOptions,
    far_rule: TensorRule,
    near_rule: TensorRule,
}

impl Ctx<'_> {
    #[inline]
    fn diff_pow(&self, df: f64) -> f64 {
        if self.p == 2.0 {
            df * df
        } else {
            df.powf(self.p)
        }
    }

    #[inline]
    fn kernel(&self, a: Point, b: Point) -> f64 {
        let d = a - b;
        let r2 = d.dot(d);
        r2.powf(-0.5 * self.kappa)
    }

    fn samples(&self, b: &Aabb, collar: bool, rule: &TensorRule) -> Vec<Sample> {
        rule.on_box(b)
            .filter_map(|(x, w)| {
                if collar && !self.domain.inside(x) {
                    None
                } else {
                    Some(Sample { x, w, f: (self.f)(x) })
                }
            })
            .collect()
    }

    fn direct(&self, a: &[Sample], b: &[Sample]) -> f64 {
        let mut acc = 0.0;
        for sa in a {
            for sb in b {
                let df = (sa.f - sb.f).abs();
                if df > 0.0 {
                    acc += sa.w * sb.w * self.diff_pow(df) * self.kernel(sa.x, sb.x);
                }
            }
        }
        acc
    }

    /// Non-touching boxes: split the larger until the pair is separated by
    /// at least its size.
    fn separated(&self, a: &Aabb, ca: bool, b: &Aabb, cb: bool, rule: &TensorRule, acc: &mut NeumaierSum) {
        let d = a.dist_to_box(b);
        let (sa, sb) = (a.width(), b.width());
        if d >= sa.max(sb) || sa.max(sb) < 1e-300 {
            acc.add(self.direct(&self.samples(a, ca, rule), &self.samples(b, cb, rule)));
            return;
        }
        if sa >= sb {
            for c in quarters(a) {
                self.separated(&c, ca, b, cb, rule, acc);
            }
        } else {
            for c in quarters(b) {
                self.separated(a, ca, &c, cb, rule, acc);
            }
        }
    }

    /// Touching pair, weighted by `weight`; contributions found at
    /// subdivision depth d go to `inc[d]`.
    #[allow(clippy::too_many_arguments)]
    fn near(&self, a: &Aabb, ca: bool, b: &Aabb, cb: bool, depth: u32, weight: f64, inc: &mut [NeumaierSum]) {
        let (sa, sb) = (a.width(), b.width());
        if sa > 1.5 * sb || sb > 1.5 * sa {
            // equalize sizes first
            let (big, cbig, small, csmall, big_is_a) = if sa > sb { (a, ca, b, cb, true) } else { (b, cb, a, ca, false) };
            for c in quarters(big) {
                let (x, cx, y, cy) = if big_is_a { (&c, cbig, small, csmall) } else { (small, csmall, &c, cbig) };
                if apart(&c, small) {
                    let mut acc = NeumaierSum::new();
                    self.separated(x, cx, y, cy, &self.near_rule, &mut acc);
                    inc[depth as usize].add(weight * acc.value());
                } else {
                    self.near(x, cx, y, cy, depth, weight, inc);
                }
            }
            return;
        }
        if depth >= self.opts.near_depth {
            return;
        }
        let same = a == b && ca == cb;
        let qa = quarters(a);
        let qb = quarters(b);
        let sa: Vec<Vec<Sample>> = qa.iter().map(|x| self.samples(x, ca, &self.near_rule)).collect();
        let sb: Vec<Vec<Sample>> = if same { sa.clone() } else { qb.iter().map(|y| self.samples(y, cb, &self.near_rule)).collect() };
        for i in 0..4 {
            for j in 0..4 {
                if same && j < i {
                    continue;
                }
                let w = if same && i != j { 2.0 * weight } else { weight };
                if apart(&qa[i], &qb[j]) {
                    inc[depth as usize + 1].add(w * self.direct(&sa[i], &sb[j]));
                } else {
                    self.near(&qa[i], ca, &qb[j], cb, depth + 1, w, inc);
                }
            }
        }
    }
}

/// Positive gap beyond rounding.
fn apart(a: &Aabb, b: &Aabb) -> bool {
    a.dist_to_box(b) > 1e-9 * a.width().max(b.width())
}

fn quarters(b: &Aabb) -> [Aabb; 4] {
    let c = b.center();
    [
        Aabb::new(b.min, c),
        Aabb::new(Point::new(c.x, b.min.y), Point::new(b.max.x, c.y)),
        Aabb::new(Point::new(b.min.x, c.y), Point::new(c.x, b.max.y)),
        Aabb::new(c, b.max),
    ]
}

/// Gagliardo double integral of f over G × G, organized over the leaves of
/// the cover (Whitney cubes plus indicator-weighted collar cells).
///
/// Far leaf pairs use tensor Gauss quadrature, with Barnes–Hut aggregation of
/// distant tree nodes. Touching pairs are subdivided `near_depth` times; the
/// excluded diagonal core scales like h^{p(1−s)} for smooth f and is
/// extrapolated from the last two depths.
pub fn frac_seminorm(
    f: &(dyn Fn(Point) -> f64 + Sync),
    domain: &Domain,
    cover: &WhitneyCover,
    s: f64,
    p: f64,
    opts: FracOptions,
) -> Result<FracSeminorm> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Parameter(format!("s = {s} must lie in (0, 1)")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p = {p} must lie in (1, ∞)")));
    }
    if opts.near_depth == 0 {
        return Err(Error::Parameter("near_depth must be at least 1".into()));
    }
    let ctx = Ctx {
        f,
        domain,
        p,
        kappa: 2.0 + s * p,
        opts,
        far_rule: TensorRule::new(opts.order, 0),
        near_rule: TensorRule::new(opts.near_order, 0),
    };
    let frame = cover.frame;

    let mut cubes: Vec<(DyadicCube, bool)> = cover.cubes.iter().map(|c| (c.cube, false)).collect();
    cubes.extend(cover.collar.iter().map(|c| (*c, true)));
    let leaves: Vec<Leaf> = cubes
        .par_iter()
        .map(|&(c, collar)| {
            let bbox = frame.cube_box(&c);
            let samples = ctx.samples(&bbox, collar, &ctx.far_rule);
            let fmin = samples.iter().map(|s| s.f).fold(f64::INFINITY, f64::min);
            let fmax = samples.iter().map(|s| s.f).fold(f64::NEG_INFINITY, f64::max);
            Leaf { bbox, collar, samples, fmin, fmax }
        })
        .collect();
    let (leaves, cubes): (Vec<Leaf>, Vec<(DyadicCube, bool)>) =
        leaves.into_iter().zip(cubes).filter(|(l, _)| !l.samples.is_empty()).unzip();
    let collar_leaves = cubes.iter().filter(|c| c.1).count();

    // quadtree over all ancestors of leaves
    let mut index: HashMap<DyadicCube, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut cube_of: Vec<DyadicCube> = Vec::new();
    let new_node = |c: DyadicCube, nodes: &mut Vec<Node>, cube_of: &mut Vec<DyadicCube>| {
        nodes.push(Node {
            bbox: frame.cube_box(&c),
            children: Vec::new(),
            leaf: None,
            fmin: f64::INFINITY,
            fmax: f64::NEG_INFINITY,
            reps: Vec::new(),
            agg: (0.0, Point::new(0.0, 0.0), 0.0),
        });
        cube_of.push(c);
        nodes.len() - 1
    };
    let root = new_node(DyadicCube::ROOT, &mut nodes, &mut cube_of);
    index.insert(DyadicCube::ROOT, root);
    for (li, (c, _)) in cubes.iter().enumerate() {
        let mut chain = vec![*c];
        let mut q = *c;
        while let Some(par) = q.parent() {
            chain.push(par);
            q = par;
        }
        let mut parent = root;
        for q in chain.into_iter().rev().skip(1) {
            let id = match index.get(&q) {
                Some(&id) => id,
                None => {
                    let id = new_node(q, &mut nodes, &mut cube_of);
                    index.insert(q, id);
                    nodes[parent].children.push(id);
                    id
                }
            };
            parent = id;
        }
        nodes[parent].leaf = Some(li);
    }
    // bottom-up aggregates
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(cube_of[i].level));
    for &i in &order {
        if let Some(li) = nodes[i].leaf {
            let l = &leaves[li];
            let reps: Vec<Rep> = l.samples.iter().map(|s| Rep { w: s.w, c: s.x, f: s.f }).collect();
            let agg = aggregate(&reps);
            let n = &mut nodes[i];
            n.fmin = l.fmin;
            n.fmax = l.fmax;
            n.agg = agg;
            n.reps = reps;
        } else {
            let ch = nodes[i].children.clone();
            let mut reps = Vec::new();
            let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
            for &c in &ch {
                fmin = fmin.min(nodes[c].fmin);
                fmax = fmax.max(nodes[c].fmax);
                if nodes[c].leaf.is_some() {
                    let a = nodes[c].agg;
                    reps.push(Rep { w: a.0, c: a.1, f: a.2 });
                } else {
                    for &g in &nodes[c].children {
                        let a = nodes[g].agg;
                        reps.push(Rep { w: a.0, c: a.1, f: a.2 });
                    }
                }
            }
            let sub: Vec<Rep> = ch.iter().map(|&c| Rep { w: nodes[c].agg.0, c: nodes[c].agg.1, f: nodes[c].agg.2 }).collect();
            let n = &mut nodes[i];
            n.agg = aggregate(&sub);
            n.reps = reps;
            n.fmin = fmin;
            n.fmax = fmax;
        }
    }

    let depth = opts.near_depth as usize;
    let per_leaf: Vec<(f64, Vec<f64>)> = (0..leaves.len())
        .into_par_iter()
        .map(|ia| {
            let a = &leaves[ia];
            let mut far = NeumaierSum::new();
            let mut inc: Vec<NeumaierSum> = (0..=depth).map(|_| NeumaierSum::new()).collect();
            let mut stack = vec![root];
            while let Some(ni) = stack.pop() {
                let node = &nodes[ni];
                if a.fmin == a.fmax && node.fmin == node.fmax && a.fmin == node.fmin {
                    continue;
                }
                if let Some(ib) = node.leaf {
                    let b = &leaves[ib];
                    if ib == ia || !apart(&a.bbox, &b.bbox) {
                        // symmetric integrand: each touching pair once
                        if ib >= ia {
                            let w = if ib == ia { 1.0 } else { 2.0 };
                            ctx.near(&a.bbox, a.collar, &b.bbox, b.collar, 0, w, &mut inc);
                        }
                    } else if a.bbox.dist_to_box(&b.bbox) >= a.bbox.width().max(b.bbox.width()) {
                        far.add(ctx.direct(&a.samples, &b.samples));
                    } else {
                        ctx.separated(&a.bbox, a.collar, &b.bbox, b.collar, &ctx.far_rule, &mut far);
                    }
                    continue;
                }
                let d = a.bbox.dist_to_box(&node.bbox);
                if d >= opts.eta * node.bbox.width() {
                    let mut acc = 0.0;
                    for sa in &a.samples {
                        for r in &node.reps {
                            let df = (sa.f - r.f).abs();
                            if df > 0.0 {
                                acc += sa.w * r.w * ctx.diff_pow(df) * ctx.kernel(sa.x, r.c);
                            }
                        }
                    }
                    far.add(acc);
                } else {
                    stack.extend(node.children.iter().rev());
                }
            }
            (far.value(), inc.iter().map(|s| s.value()).collect())
        })
        .collect();

    let mut far = NeumaierSum::new();
    let mut inc: Vec<NeumaierSum> = (0..=depth).map(|_| NeumaierSum::new()).collect();
    for (fv, iv) in &per_leaf {
        far.add(*fv);
        for (acc, v) in inc.iter_mut().zip(iv) {
            acc.add(*v);
        }
    }
    let inc: Vec<f64> = inc.iter().map(|s| s.value()).collect();
    let base = far.value() + inc[..depth].iter().sum::<f64>();
    let truncated = base + inc[depth];
    let alpha = p * (1.0 - s);
    let core_tail = inc[depth] / (2f64.powf(alpha) - 1.0);
    Ok(FracSeminorm {
        integral: truncated + core_tail,
        core_tail,
        truncated,
        truncated_coarse: base,
        leaves: leaves.len(),
        collar_leaves,
    })
}

fn aggregate(reps: &[Rep]) -> (f64, Point, f64) {
    let w: f64 = reps.iter().map(|r| r.w).sum();
    if w == 0.0 {
        return (0.0, reps.first().map_or(Point::new(0.0, 0.0), |r| r.c), 0.0);
    }
    let cx = reps.iter().map(|r| r.w * r.c.x).sum::<f64>() / w;
    let cy = reps.iter().map(|r| r.w * r.c.y).sum::<f64>() / w;
    let f = reps.iter().map(|r| r.w * r.f).sum::<f64>() / w;
    (w, Point::new(cx, cy), f)
}
