use crate::error::{Error, Result};
use crate::geometry::{Aabb, Point};
use crate::quadrature::TensorRule;

/// Exponent pairs (a, b) with a + b ≤ k − 1, ordered by total degree.
pub fn basis_indices(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in 0..k {
        for a in (0..=d).rev() {
            out.push((a, d - a));
        }
    }
    out
}

/// Legendre values P_0..=P_m at t, scaled by √(2n+1) (orthonormal for dt/2 on [−1,1]).
fn normalized_legendre(m: usize, t: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if m >= 1 {
        out[1] = t;
    }
    for n in 2..=m {
        out[n] = ((2 * n - 1) as f64 * t * out[n - 1] - (n - 1) as f64 * out[n - 2]) / n as f64;
    }
    for (n, v) in out.iter_mut().enumerate().take(m + 1) {
        *v *= ((2 * n + 1) as f64).sqrt();
    }
}

/// Values of the orthonormal basis at reference point (u, v) ∈ [−1,1]².
pub fn basis_values(k: usize, u: f64, v: f64) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let mut lu = vec![0.0; k];
    let mut lv = vec![0.0; k];
    normalized_legendre(k - 1, u, &mut lu);
    normalized_legendre(k - 1, v, &mut lv);
    basis_indices(k).into_iter().map(|(a, b)| lu[a] * lv[b]).collect()
}

/// Basis size bound for [`basis_array`] (k ≤ 4).
pub const MAX_BASIS: usize = 10;

/// Allocation-free variant of [`basis_values`] for k ≤ 4.
#[inline]
pub fn basis_array(k: usize, u: f64, v: f64) -> [f64; MAX_BASIS] {
    debug_assert!(k <= 4);
    let mut lu = [0.0; 4];
    let mut lv = [0.0; 4];
    let mut out = [0.0; MAX_BASIS];
    if k == 0 {
        return out;
    }
    normalized_legendre(k - 1, u, &mut lu);
    normalized_legendre(k - 1, v, &mut lv);
    let mut i = 0;
    for d in 0..k {
        for a in (0..=d).rev() {
            out[i] = lu[a] * lv[d - a];
            i += 1;
        }
    }
    out
}

/// Smallest tensor Gauss order accepted for degree bound k.
pub fn min_order(k: usize) -> usize {
    k.div_ceil(2) + 1
}

pub fn check_order(order: usize, k: usize) -> Result<()> {
    if order < min_order(k) {
        Err(Error::QuadratureInsufficient { order, k })
    } else {
        Ok(())
    }
}

/// Polynomial of degree ≤ k − 1 on a box, stored in the box's orthonormal
/// tensor Legendre basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPolynomial {
    pub region: Aabb,
    pub k: usize,
    pub coeffs: Vec<f64>,
}

impl LocalPolynomial {
    pub fn zero(region: Aabb, k: usize) -> Self {
        Self { region, k, coeffs: vec![0.0; basis_indices(k).len()] }
    }

    fn reference(&self, p: Point) -> (f64, f64) {
        let c = self.region.center();
        (2.0 * (p.x - c.x) / self.region.width(), 2.0 * (p.y - c.y) / self.region.height())
    }

    pub fn eval(&self, p: Point) -> f64 {
        if self.k == 0 {
            return 0.0;
        }
        let (u, v) = self.reference(p);
        basis_values(self.k, u, v).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }

    /// Monomial coefficients m[i][j] of x^i y^j in world coordinates.
    pub fn to_monomials(&self) -> Vec<Vec<f64>> {
        let deg = self.k.max(1);
        let mut out = vec![vec![0.0; deg]; deg];
        if self.k == 0 {
            return out;
        }
        let c = self.region.center();
        let px = legendre_in_world(self.k - 1, 2.0 / self.region.width(), c.x);
        let py = legendre_in_world(self.k - 1, 2.0 / self.region.height(), c.y);
        for ((a, b), coef) in basis_indices(self.k).into_iter().zip(&self.coeffs) {
            for (i, xa) in px[a].iter().enumerate() {
                for (j, yb) in py[b].iter().enumerate() {
                    out[i][j] += coef * xa * yb;
                }
            }
        }
        out
    }
}

/// Coefficients in x of √(2n+1)·P_n(α(x − c)) for n = 0..=m.
fn legendre_in_world(m: usize, alpha: f64, c: f64) -> Vec<Vec<f64>> {
    // P_n in powers of t
    let mut pt: Vec<Vec<f64>> = vec![vec![1.0]];
    if m >= 1 {
        pt.push(vec![0.0, 1.0]);
    }
    for n in 2..=m {
        let mut next = vec![0.0; n + 1];
        for (i, a) in pt[n - 1].iter().enumerate() {
            next[i + 1] += (2 * n - 1) as f64 * a / n as f64;
        }
        for (i, a) in pt[n - 2].iter().enumerate() {
            next[i] -= (n - 1) as f64 * a / n as f64;
        }
        pt.push(next);
    }
    pt.into_iter()
        .enumerate()
        .map(|(n, coeffs)| {
            let scale = ((2 * n + 1) as f64).sqrt();
            let mut out = vec![0.0; n + 1];
            for (i, a) in coeffs.iter().enumerate() {
                // a·α^i·(x − c)^i
                let ai = a * alpha.powi(i as i32) * scale;
                let mut binom = 1.0;
                for r in 0..=i {
                    out[r] += ai * binom * (-c).powi((i - r) as i32);
                    binom = binom * (i - r) as f64 / (r + 1) as f64;
                }
            }
            out
        })
        .collect()
}

/// Projection coefficients from values sampled at the rule's nodes.
pub fn project_values(values: &[f64], rule: &TensorRule, k: usize) -> Vec<f64> {
    let mut c = vec![0.0; basis_indices(k).len()];
    if k == 0 {
        return c;
    }
    for (&(u, v, w), &f) in rule.nodes.iter().zip(values) {
        for (ci, b) in c.iter_mut().zip(basis_values(k, u, v)) {
            *ci += w * f * b;
        }
    }
    c
}

/// L^u(average) norm of `values − P` over the rule, u = ∞ taking the max.
pub fn residual_norm(values: &[f64], coeffs: &[f64], rule: &TensorRule, k: usize, u: f64) -> f64 {
    let mut acc = 0.0f64;
    for (&(x, y, w), &f) in rule.nodes.iter().zip(values) {
        let p: f64 = if k == 0 { 0.0 } else { basis_values(k, x, y).iter().zip(coeffs).map(|(b, c)| b * c).sum() };
        let r = (f - p).abs();
        if u.is_infinite() {
            acc = acc.max(r);
        } else {
            acc += w * r.powf(u);
        }
    }
    if u.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / u)
    }
}

/// L²(Q) orthogonal projection of `f` onto polynomials of degree ≤ k − 1.
pub fn project_polynomial(f: impl Fn(Point) -> f64, region: &Aabb, k: usize, rule: &TensorRule) -> Result<LocalPolynomial> {
    check_order(rule.order, k)?;
    let values: Vec<f64> = rule.on_box(region).map(|(p, _)| f(p)).collect();
    Ok(LocalPolynomial { region: *region, k, coeffs: project_values(&values, rule, k) })
}

/// Normalized local approximation error (⨍_Q |f − P_{k,Q} f|^u)^{1/u}.
pub fn local_approx_error(f: impl Fn(Point) -> f64, region: &Aabb, k: usize, u: f64, rule: &TensorRule) -> Result<f64> {
    check_order(rule.order, k)?;
    if !(u >= 1.0) {
        return Err(Error::Parameter(format!("local exponent u = {u} must be ≥ 1")));
    }
    let values: Vec<f64> = rule.on_box(region).map(|(p, _)| f(p)).collect();
    let c = project_values(&values, rule, k);
    Ok(residual_norm(&values, &c, rule, k, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> Aabb {
        Aabb::square(Point::new(0.0, 0.0), 1.0)
    }

    #[test]
    fn basis_is_orthonormal() {
        let rule = TensorRule::new(4, 0);
        for k in 1..=3 {
            let n = basis_indices(k).len();
            let mut g = vec![0.0; n * n];
            for &(u, v, w) in &rule.nodes {
                let b = basis_values(k, u, v);
                for i in 0..n {
                    for j in 0..n {
                        g[i * n + j] += w * b[i] * b[j];
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    assert!((g[i * n + j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn constant_and_mean() {
        let rule = TensorRule::new(4, 0);
        let p = project_polynomial(|_| 3.0, &unit(), 1, &rule).unwrap();
        assert_relative_eq!(p.eval(Point::new(0.2, 0.9)), 3.0, epsilon = 1e-14);
        let q = project_polynomial(|p| p.x, &unit(), 1, &rule).unwrap();
        assert_relative_eq!(q.eval(Point::new(0.2, 0.9)), 0.5, epsilon = 1e-14);
        let z = project_polynomial(|p| p.x, &unit(), 0, &rule).unwrap();
        assert!(z.coeffs.is_empty());
        assert_eq!(z.eval(Point::new(0.3, 0.3)), 0.0);
    }

    #[test]
    fn closed_form_errors() {
        let rule = TensorRule::new(4, 0);
        let e1 = local_approx_error(|p| p.x, &unit(), 1, 2.0, &rule).unwrap();
        assert_relative_eq!(e1, 1.0 / 12f64.sqrt(), epsilon = 1e-13);
        let e2 = local_approx_error(|p| p.x * p.x, &unit(), 2, 2.0, &rule).unwrap();
        assert_relative_eq!(e2, 1.0 / (6.0 * 5f64.sqrt()), epsilon = 1e-13);
        let e0 = local_approx_error(|p| 2.0 * p.x - p.y + 1.0, &unit(), 2, 1.0, &rule).unwrap();
        assert!(e0 < 1e-12);
    }

    #[test]
    fn insufficient_order_is_rejected() {
        let rule = TensorRule::new(1, 0);
        assert_eq!(
            local_approx_error(|p| p.x, &unit(), 2, 2.0, &rule),
            Err(Error::QuadratureInsufficient { order: 1, k: 2 })
        );
    }

    #[test]
    fn monomial_expansion_is_exact() {
        let rule = TensorRule::new(5, 0);
        let b = Aabb::new(Point::new(-0.3, 1.2), Point::new(0.45, 1.95));
        let f = |p: Point| 1.0 - 2.0 * p.x + 0.5 * p.y + 3.0 * p.x * p.y - p.y * p.y + 0.7 * p.x * p.x;
        let poly = project_polynomial(f, &b, 3, &rule).unwrap();
        let m = poly.to_monomials();
        let want = [[1.0, 0.5, -1.0], [-2.0, 3.0, 0.0], [0.7, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - want[i][j]).abs() < 1e-12, "{i} {j}: {}", m[i][j]);
            }
        }
        let p = Point::new(0.1, 1.5);
        assert!((poly.eval(p) - f(p)).abs() < 1e-12);
    }

    #[test]
    fn infinity_norm_is_node_max() {
        let rule = TensorRule::new(3, 0);
        let e = local_approx_error(|p| p.x, &unit(), 1, f64::INFINITY, &rule).unwrap();
        let (x, _) = crate::quadrature::gauss_legendre(3);
        let node_max = x.iter().map(|t| (0.5 * t).abs()).fold(0.0, f64::max);
        assert_relative_eq!(e, node_max, epsilon = 1e-14);
    }
}
