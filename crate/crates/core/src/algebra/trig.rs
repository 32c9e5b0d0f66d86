use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::torus::{torus_sup, TorusView};

/// Trigonometric polynomial `f(θ) = Σ c_n e^{inθ}` on the circle.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TrigPolynomial {
    coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPolynomial {
    pub fn new(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, c) in terms {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite(format!("coefficient {n}")));
            }
            *coeffs.entry(n).or_default() += c;
        }
        coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(Self { coeffs })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new([(0, c)]).expect("finite constant")
    }

    pub fn coefficients(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coefficient(&self, n: i64) -> Complex64 {
        self.coeffs.get(&n).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&n, c)| c * Complex64::from_polar(1.0, n as f64 * theta))
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (&n, a) in &self.coeffs {
            for (&m, b) in &other.coeffs {
                *out.entry(n + m).or_default() += a * b;
            }
        }
        out.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Self { coeffs: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, s: f64) -> Self {
        let mut out = self.coeffs.clone();
        for (&n, c) in &other.coeffs {
            *out.entry(n).or_default() += c * s;
        }
        out.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Self { coeffs: out }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|(&n, c)| (n, c * s))).expect("finite scale")
    }

    /// Pointwise conjugate: coefficients `conj(c_{-n})`.
    pub fn adjoint(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&n, c)| (-n, c.conj())).collect(),
        }
    }

    /// `f′`, with coefficients `i n c_n`.
    pub fn derivative(&self) -> Self {
        let mut coeffs: BTreeMap<i64, Complex64> = self
            .coeffs
            .iter()
            .map(|(&n, c)| (n, c * Complex64::new(0.0, n as f64)))
            .collect();
        coeffs.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Self { coeffs }
    }

    /// `sup_θ |f(θ)|`.
    pub fn sup_norm(&self) -> f64 {
        let view = TorusView {
            dim: 1,
            period: None,
            terms: self.coeffs.iter().map(|(&n, c)| (vec![n], *c)).collect(),
        };
        torus_sup(&view).expect("one-dimensional symbols are supported")
    }

    pub fn to_json(&self) -> TrigJson {
        TrigJson {
            terms: self.coeffs.iter().map(|(&n, c)| (n, c.re, c.im)).collect(),
        }
    }

    pub fn from_json(j: &TrigJson) -> Result<Self> {
        Self::new(j.terms.iter().map(|&(n, re, im)| (n, Complex64::new(re, im))))
    }
}

/// `‖f‖_∞ + ‖f′‖_∞`.
pub fn deriv_domain_norm(f: &TrigPolynomial) -> f64 {
    f.sup_norm() + f.derivative().sup_norm()
}

/// Wire format: `{"terms": [[n, re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigJson {
    pub terms: Vec<(i64, f64, f64)>,
}
