use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::check_order;
use crate::error::{Error, Result};

/// Smoothness and integrability indices for the discrete norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    pub s: f64,
    pub p: f64,
    /// Fine index; `"inf"` in JSON for q = ∞.
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub q: f64,
    pub k: usize,
    pub u: f64,
    /// Gauss nodes per axis.
    pub order: usize,
}

impl NormParams {
    /// Defaults: k = ⌊s⌋ + 1, u = min(p, q), 4 nodes per axis.
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        let np = Self { s, p, q, k: s.floor() as usize + 1, u: p.min(q), order: 4 };
        np.validate()?;
        Ok(np)
    }

    pub fn with_k(mut self, k: usize) -> Result<Self> {
        self.k = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_u(mut self, u: f64) -> Result<Self> {
        self.u = u;
        self.validate()?;
        Ok(self)
    }

    pub fn with_order(mut self, order: usize) -> Result<Self> {
        self.order = order;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.s > 0.0 && self.s.is_finite()) {
            return bad(format!("s = {} must be positive", self.s));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad(format!("p = {} must lie in (1, ∞)", self.p));
        }
        if !(self.q >= 1.0) {
            return bad(format!("q = {} must be ≥ 1", self.q));
        }
        if !(self.s < self.k as f64) {
            return bad(format!("s = {} must be below k = {}", self.s, self.k));
        }
        if self.k > 3 {
            return bad(format!("k = {} unsupported (k ≤ 3)", self.k));
        }
        if !(self.u >= 1.0 && self.u <= self.p.min(self.q)) {
            return bad(format!("u = {} must lie in [1, min(p, q)]", self.u));
        }
        check_order(self.order, self.k)
    }
}

pub(crate) fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

pub(crate) fn de_extended<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Num(x) => Ok(x),
        Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity" | "∞") => Ok(f64::INFINITY),
        Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
    }
}
