//! Gauss–Legendre rules and tensor rules on squares.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::geometry::{Aabb, Point};

/// Gauss–Legendre nodes and weights on [-1, 1] (weights sum to 2).
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&order) {
        return hit.clone();
    }
    let rule = compute_gauss_legendre(order);
    cache.lock().unwrap().insert(order, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss–Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if (1.0 - x * x).abs() < 1e-300 {
        nf * (nf + 1.0) / 2.0 * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// Composite tensor Gauss rule on the reference square [-1,1]²,
/// normalized so the weights sum to one (an averaging rule).
#[derive(Clone, Debug)]
pub struct TensorRule {
    pub order: usize,
    pub refine: u32,
    /// (u, v, weight) with u, v ∈ [-1, 1].
    pub nodes: Vec<(f64, f64, f64)>,
}

impl TensorRule {
    pub fn new(order: usize, refine: u32) -> Self {
        let (x, w) = gauss_legendre(order);
        let m = 1usize << refine;
        let h = 2.0 / m as f64;
        let mut nodes = Vec::with_capacity(m * m * order * order);
        let norm = 1.0 / (4.0 * (m * m) as f64);
        for cy in 0..m {
            for cx in 0..m {
                let ox = -1.0 + h * (cx as f64 + 0.5);
                let oy = -1.0 + h * (cy as f64 + 0.5);
                for (j, &yj) in x.iter().enumerate() {
                    for (i, &xi) in x.iter().enumerate() {
                        nodes.push((ox + 0.5 * h * xi, oy + 0.5 * h * yj, w[i] * w[j] * norm));
                    }
                }
            }
        }
        Self { order, refine, nodes }
    }

    /// World-space nodes on `b` with weights scaled to the box area.
    pub fn on_box(&self, b: &Aabb) -> impl Iterator<Item = (Point, f64)> + '_ {
        let c = b.center();
        let hx = 0.5 * b.width();
        let hy = 0.5 * b.height();
        let area = b.area();
        self.nodes
            .iter()
            .map(move |&(u, v, w)| (Point::new(c.x + hx * u, c.y + hy * v), w * area))
    }
}

/// Integral of `f` over [a, b] with `pieces` equal Gauss panels.
pub fn gauss_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize, pieces: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / pieces as f64;
    let mut acc = crate::sum::NeumaierSum::new();
    for k in 0..pieces {
        let lo = a + h * k as f64;
        for (xi, wi) in x.iter().zip(&w) {
            acc.add(0.5 * h * wi * f(lo + 0.5 * h * (xi + 1.0)));
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-12, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn tensor_rule_is_averaging() {
        let r = TensorRule::new(3, 2);
        let s: f64 = r.nodes.iter().map(|n| n.2).sum();
        assert!((s - 1.0).abs() < 1e-14);
        let m: f64 = r.nodes.iter().map(|n| n.2 * n.0 * n.0 * n.1 * n.1).sum();
        assert!((m - 1.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_panels() {
        let v = gauss_1d(|x| x.exp(), 0.0, 1.0, 5, 3);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }
}
