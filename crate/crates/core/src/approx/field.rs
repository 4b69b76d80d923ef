use serde::{Deserialize, Serialize};

use crate::geometry::{Aabb, Point};

/// Scalar test functions on the plane.
///
/// JSON form is tagged by `kind`, e.g. `{"kind":"bump","center":[0,0],"radius":1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarField {
    Zero,
    Constant {
        value: f64,
    },
    /// Smooth plateau bump: 1 on B(c, radius/2), 0 outside B(c, radius).
    Bump {
        center: Point,
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Σ coeffs[i][j]·x^i·y^j.
    Poly {
        coeffs: Vec<Vec<f64>>,
    },
    /// x (axis 0) or y (axis 1).
    Coordinate {
        axis: usize,
    },
    /// Bilinear interpolation of node values on a regular grid, zero outside.
    Grid {
        origin: Point,
        spacing: f64,
        nx: usize,
        ny: usize,
        /// Row-major, `ny` rows of `nx` values.
        values: Vec<f64>,
    },
    Product {
        factors: Vec<ScalarField>,
    },
    Sum {
        terms: Vec<ScalarField>,
    },
    /// x ↦ field((x − center)/scale + center).
    Dilated {
        field: Box<ScalarField>,
        center: Point,
        scale: f64,
    },
    /// x ↦ field(x − offset).
    Translated {
        field: Box<ScalarField>,
        offset: Point,
    },
}

fn one() -> f64 {
    1.0
}

/// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1.
pub fn smooth_step(t: f64) -> f64 {
    fn h(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    let a = h(t);
    let b = h(1.0 - t);
    if a + b == 0.0 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Radial profile of the plateau bump at normalized radius t = |x − c|/radius.
pub fn plateau_profile(t: f64) -> f64 {
    smooth_step(2.0 * (1.0 - t))
}

impl ScalarField {
    pub fn bump(center: Point, radius: f64) -> Self {
        ScalarField::Bump { center, radius, amplitude: 1.0 }
    }

    pub fn eval(&self, p: Point) -> f64 {
        match self {
            ScalarField::Zero => 0.0,
            ScalarField::Constant { value } => *value,
            ScalarField::Bump { center, radius, amplitude } => {
                let t = p.dist(*center) / radius;
                if t >= 1.0 {
                    0.0
                } else {
                    amplitude * plateau_profile(t)
                }
            }
            ScalarField::Poly { coeffs } => {
                let mut acc = 0.0;
                let mut xi = 1.0;
                for row in coeffs {
                    let mut yj = 1.0;
                    for c in row {
                        acc += c * xi * yj;
                        yj *= p.y;
                    }
                    xi *= p.x;
                }
                acc
            }
            ScalarField::Coordinate { axis } => {
                if *axis == 0 {
                    p.x
                } else {
                    p.y
                }
            }
            ScalarField::Grid { origin, spacing, nx, ny, values } => {
                let u = (p.x - origin.x) / spacing;
                let v = (p.y - origin.y) / spacing;
                if u < 0.0 || v < 0.0 || u > (*nx - 1) as f64 || v > (*ny - 1) as f64 {
                    return 0.0;
                }
                let i = (u.floor() as usize).min(nx - 2);
                let j = (v.floor() as usize).min(ny - 2);
                let (a, b) = (u - i as f64, v - j as f64);
                let at = |i: usize, j: usize| values[j * nx + i];
                (1.0 - a) * (1.0 - b) * at(i, j) + a * (1.0 - b) * at(i + 1, j) + (1.0 - a) * b * at(i, j + 1) + a * b * at(i + 1, j + 1)
            }
            ScalarField::Product { factors } => factors.iter().map(|f| f.eval(p)).product(),
            ScalarField::Sum { terms } => terms.iter().map(|f| f.eval(p)).sum(),
            ScalarField::Dilated { field, center, scale } => {
                field.eval(Point::new(center.x + (p.x - center.x) / scale, center.y + (p.y - center.y) / scale))
            }
            ScalarField::Translated { field, offset } => field.eval(p - *offset),
        }
    }

    /// A box containing {f ≠ 0}, or `None` when the support is unbounded.
    pub fn support(&self) -> Option<Aabb> {
        match self {
            ScalarField::Zero => Some(Aabb::empty()),
            ScalarField::Constant { value } if *value == 0.0 => Some(Aabb::empty()),
            ScalarField::Bump { center, radius, .. } => Some(Aabb::centered(*center, *radius)),
            ScalarField::Grid { origin, spacing, nx, ny, .. } => Some(Aabb::new(
                *origin,
                Point::new(origin.x + spacing * (*nx - 1) as f64, origin.y + spacing * (*ny - 1) as f64),
            )),
            ScalarField::Product { factors } => {
                let mut acc: Option<Aabb> = None;
                for f in factors {
                    if let Some(b) = f.support() {
                        acc = Some(match acc {
                            None => b,
                            Some(a) => intersect(&a, &b),
                        });
                    }
                }
                acc
            }
            ScalarField::Sum { terms } => {
                let mut acc = Aabb::empty();
                for t in terms {
                    acc = acc.union(&t.support()?);
                }
                Some(acc)
            }
            ScalarField::Dilated { field, center, scale } => field.support().map(|b| {
                if b.width() < 0.0 {
                    return b;
                }
                let m = |q: Point| Point::new(center.x + (q.x - center.x) * scale, center.y + (q.y - center.y) * scale);
                Aabb::new(m(b.min), m(b.max))
            }),
            ScalarField::Translated { field, offset } => {
                field.support().map(|b| Aabb::new(b.min + *offset, b.max + *offset))
            }
            _ => None,
        }
    }

    /// Polynomial degree when the field is a polynomial.
    pub fn polynomial_degree(&self) -> Option<u32> {
        match self {
            ScalarField::Zero | ScalarField::Constant { .. } => Some(0),
            ScalarField::Coordinate { .. } => Some(1),
            ScalarField::Poly { coeffs } => {
                let mut d = 0;
                for (i, row) in coeffs.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        if *c != 0.0 {
                            d = d.max((i + j) as u32);
                        }
                    }
                }
                Some(d)
            }
            ScalarField::Product { factors } => factors.iter().map(|f| f.polynomial_degree()).sum(),
            ScalarField::Sum { terms } => terms.iter().map(|f| f.polynomial_degree()).max().flatten(),
            ScalarField::Dilated { field, .. } | ScalarField::Translated { field, .. } => field.polynomial_degree(),
            _ => None,
        }
    }
}

fn intersect(a: &Aabb, b: &Aabb) -> Aabb {
    let min = Point::new(a.min.x.max(b.min.x), a.min.y.max(b.min.y));
    let max = Point::new(a.max.x.min(b.max.x), a.max.y.min(b.max.y));
    if min.x > max.x || min.y > max.y {
        Aabb::empty()
    } else {
        Aabb::new(min, max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        let f = ScalarField::bump(Point::new(1.0, 1.0), 2.0);
        assert_eq!(f.eval(Point::new(1.0, 1.0)), 1.0);
        assert_eq!(f.eval(Point::new(1.9, 1.0)), 1.0);
        assert_eq!(f.eval(Point::new(3.0, 1.0)), 0.0);
        let mid = f.eval(Point::new(2.5, 1.0));
        assert!((mid - 0.5).abs() < 1e-12, "{mid}");
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = f.eval(Point::new(2.0 + i as f64 / 100.0, 1.0));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn json_generators() {
        let f: ScalarField = serde_json::from_str(r#"{"kind":"bump","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(f, ScalarField::bump(Point::new(0.0, 0.0), 1.0));
        let g: ScalarField = serde_json::from_str(r#"{"kind":"poly","coeffs":[[1,2],[3]]}"#).unwrap();
        assert_eq!(g.eval(Point::new(2.0, 5.0)), 1.0 + 2.0 * 5.0 + 3.0 * 2.0);
        let h: ScalarField = serde_json::from_str(r#"{"kind":"coordinate","axis":1}"#).unwrap();
        assert_eq!(h.eval(Point::new(2.0, 5.0)), 5.0);
    }

    #[test]
    fn support_contains_nonzero_set() {
        let f = ScalarField::Dilated {
            field: Box::new(ScalarField::bump(Point::new(0.0, 0.0), 1.0)),
            center: Point::new(0.0, 0.0),
            scale: 0.25,
        };
        let s = f.support().unwrap();
        assert!((s.width() - 0.5).abs() < 1e-15);
        assert_eq!(f.eval(Point::new(0.3, 0.0)), 0.0);
        assert_eq!(f.eval(Point::new(0.1, 0.0)), 1.0);
    }

    #[test]
    fn grid_interpolation_is_bilinear() {
        let f = ScalarField::Grid {
            origin: Point::new(0.0, 0.0),
            spacing: 1.0,
            nx: 2,
            ny: 2,
            values: vec![0.0, 1.0, 2.0, 3.0],
        };
        assert!((f.eval(Point::new(0.5, 0.5)) - 1.5).abs() < 1e-15);
        assert_eq!(f.eval(Point::new(2.0, 0.5)), 0.0);
    }
}
