use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::ChainDecomposition;
use crate::approx::{project_values, residual_norm, LocalPolynomial, ScalarField};
use crate::dyadic::{DyadicCube, Frame};
use crate::error::Result;
use crate::geometry::Point;
use crate::quadrature::TensorRule;

/// Per-cube L² projections P_{k,Q} f and L¹ errors E_k(f, Q), computed once.
pub struct ProjectionCache<'a> {
    f: &'a (dyn Fn(Point) -> f64 + Sync),
    frame: Frame,
    k: usize,
    rule: TensorRule,
    cache: HashMap<DyadicCube, (Vec<f64>, f64)>,
}

impl<'a> ProjectionCache<'a> {
    /// Composite rule with `order` Gauss nodes on each of 4^refine panels.
    pub fn new(f: &'a (dyn Fn(Point) -> f64 + Sync), frame: Frame, k: usize, order: usize, refine: u32) -> Result<Self> {
        let rule = TensorRule::new(order, refine);
        if order < crate::approx::min_order(k) {
            return Err(crate::Error::QuadratureInsufficient { order, k });
        }
        Ok(Self { f, frame, k, rule, cache: HashMap::new() })
    }

    fn entry(&mut self, c: &DyadicCube) -> &(Vec<f64>, f64) {
        let (f, frame, k, rule) = (self.f, self.frame, self.k, &self.rule);
        self.cache.entry(*c).or_insert_with(|| {
            let values: Vec<f64> = rule.on_box(&frame.cube_box(c)).map(|(p, _)| f(p)).collect();
            let coeffs = project_values(&values, rule, k);
            let e = residual_norm(&values, &coeffs, rule, k, 1.0);
            (coeffs, e)
        })
    }

    pub fn projection(&mut self, c: &DyadicCube) -> LocalPolynomial {
        let region = self.frame.cube_box(c);
        let k = self.k;
        LocalPolynomial { region, k, coeffs: self.entry(c).0.clone() }
    }

    /// E_k(f, Q)_{L¹}.
    pub fn error_l1(&mut self, c: &DyadicCube) -> f64 {
        self.entry(c).1
    }

    /// max over the rule's nodes on `on` of |P_a − P_b|.
    pub fn sup_difference(&mut self, a: &DyadicCube, b: &DyadicCube, on: &DyadicCube) -> f64 {
        let pa = self.projection(a);
        let pb = self.projection(b);
        self.rule
            .on_box(&self.frame.cube_box(on))
            .map(|(x, _)| (pa.eval(x) - pb.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// (‖P_{k,Q}f − P_{k,Q₀}f‖_{L^∞(Q)}, Σ_{R∈C(Q)} E_k(f,R)_{L¹}).
    pub fn gap(&mut self, decomp: &ChainDecomposition, q: &DyadicCube) -> Result<(f64, f64)> {
        let chain = decomp.chain(q)?.to_vec();
        let lhs = self.sup_difference(q, &decomp.root, q);
        let rhs = chain.iter().map(|r| self.error_l1(r)).sum();
        Ok((lhs, rhs))
    }

    /// Consecutive steps ‖P_{Q_j}f − P_{Q_{j−1}}f‖_{L^∞(Q_j)} against E_k(f, Q_{j−1})_{L¹}.
    pub fn steps(&mut self, decomp: &ChainDecomposition, q: &DyadicCube) -> Result<Vec<TelescopeStep>> {
        let chain = decomp.chain(q)?.to_vec();
        Ok(chain
            .windows(2)
            .map(|w| TelescopeStep {
                cube: w[1],
                previous: w[0],
                lhs: self.sup_difference(&w[1], &w[0], &w[1]),
                rhs: self.error_l1(&w[0]),
            })
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TelescopeStep {
    pub cube: DyadicCube,
    pub previous: DyadicCube,
    pub lhs: f64,
    pub rhs: f64,
}

/// One-off [`ProjectionCache::gap`] with 4 Gauss nodes on 8×8 panels.
pub fn telescoping_gap(
    f: &(dyn Fn(Point) -> f64 + Sync),
    decomp: &ChainDecomposition,
    q: &DyadicCube,
    k: usize,
) -> Result<(f64, f64)> {
    ProjectionCache::new(f, decomp.frame, k, 4, 3)?.gap(decomp, q)
}

/// lhs/rhs of [`ProjectionCache::gap`] over seeded (bump, target cube) pairs.
#[derive(Clone, Debug, Serialize)]
pub struct TelescopeConstant {
    /// (target, bump centre, bump radius, lhs, rhs) per pair.
    pub pairs: Vec<(DyadicCube, Point, f64, f64, f64)>,
    /// max lhs/rhs over pairs with rhs > 0.
    pub constant: f64,
}

/// Draw `n` target cubes of `decomp` uniformly and, for each, a bump of
/// radius U(0.05, 0.2)·`scale` centred within one radius of the cube centre.
pub fn telescoping_constant(decomp: &ChainDecomposition, n: usize, scale: f64, k: usize, seed: u64) -> Result<TelescopeConstant> {
    use rand::{Rng, SeedableRng};
    if decomp.targets.is_empty() {
        return Err(crate::Error::Precondition("decomposition has no target cubes".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(DyadicCube, Point, f64)> = (0..n)
        .map(|_| {
            let q = decomp.targets[rng.gen_range(0..decomp.targets.len())];
            let radius = rng.gen_range(0.05..0.2) * scale;
            let (t, u): (f64, f64) = (rng.gen::<f64>() * std::f64::consts::TAU, rng.gen::<f64>().sqrt() * radius);
            let c = decomp.frame.center(&q);
            (q, Point::new(c.x + u * t.cos(), c.y + u * t.sin()), radius)
        })
        .collect();
    let pairs = draws
        .par_iter()
        .map(|&(q, centre, radius)| {
            let field = ScalarField::bump(centre, radius);
            let f = |x: Point| field.eval(x);
            let (lhs, rhs) = ProjectionCache::new(&f, decomp.frame, k, 4, 3)?.gap(decomp, &q)?;
            Ok((q, centre, radius, lhs, rhs))
        })
        .collect::<Result<Vec<_>>>()?;
    let constant = pairs.iter().filter(|p| p.4 > 0.0).map(|p| p.3 / p.4).fold(0.0, f64::max);
    Ok(TelescopeConstant { pairs, constant })
}

