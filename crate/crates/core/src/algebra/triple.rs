use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Exponents `(k, p, q)` of `‖a^k‖_A ≤ C ‖a‖_A^p ‖a‖_B^q`, with `p + q = k` held exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffTriple {
    k: u32,
    p: Rational,
    q: Rational,
    pub c_estimate: Option<f64>,
}

impl DiffTriple {
    pub fn new(k: u32, p: Rational, q: Rational) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k = {k} < 2")));
        }
        let zero = Rational::from_integer(0);
        if p <= zero || q <= zero {
            return Err(Error::InvalidParameter(format!("p = {p}, q = {q} must be positive")));
        }
        if p + q != Rational::from_integer(k as i64) {
            return Err(Error::InvalidParameter(format!("p + q = {} differs from k = {k}", p + q)));
        }
        Ok(Self {
            k,
            p,
            q,
            c_estimate: None,
        })
    }

    /// Triple with `q = k - p`.
    pub fn with_p(k: u32, p: Rational) -> Result<Self> {
        Self::new(k, p, Rational::from_integer(k as i64) - p)
    }

    /// Parses `"k,p,q"` with rational entries such as `"2,4/3,2/3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("triple `{s}` is not of the form k,p,q"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [k, p, q] = parts.as_slice() else {
            return Err(bad());
        };
        let k: u32 = k.parse().map_err(|_| bad())?;
        Self::new(k, parse_rational(p)?, parse_rational(q)?)
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c_estimate = Some(c);
        self
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn p(&self) -> Rational {
        self.p
    }

    pub fn q(&self) -> Rational {
        self.q
    }

    pub fn p_f64(&self) -> f64 {
        to_f64(self.p)
    }

    pub fn q_f64(&self) -> f64 {
        to_f64(self.q)
    }

    /// `log_k(max{k - 1, p})`.
    pub fn tau_bound(&self) -> f64 {
        let k = self.k as f64;
        (k - 1.0).max(self.p_f64()).ln() / k.ln()
    }
}

impl fmt::Display for DiffTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.k, self.p, self.q)
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Best rational approximation of a real parameter.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::approximate_float(x).ok_or_else(|| Error::InvalidParameter(format!("{x} has no rational approximation")))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    } else if let Ok(n) = s.parse::<i64>() {
        Ok(Rational::from_integer(n))
    } else {
        rational_from_f64(s.parse::<f64>().map_err(|_| bad())?)
    }
}

/// Serialized form: exact fractions as strings next to their decimal values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffTripleJson {
    pub k: u32,
    pub p: String,
    pub q: String,
    pub p_value: f64,
    pub q_value: f64,
    pub c_estimate: Option<f64>,
}

impl From<&DiffTriple> for DiffTripleJson {
    fn from(t: &DiffTriple) -> Self {
        Self {
            k: t.k,
            p: t.p.to_string(),
            q: t.q.to_string(),
            p_value: t.p_f64(),
            q_value: t.q_f64(),
            c_estimate: t.c_estimate,
        }
    }
}

impl TryFrom<&DiffTripleJson> for DiffTriple {
    type Error = Error;
    fn try_from(j: &DiffTripleJson) -> Result<Self> {
        let mut t = DiffTriple::new(j.k, parse_rational(&j.p)?, parse_rational(&j.q)?)?;
        t.c_estimate = j.c_estimate;
        Ok(t)
    }
}

fn rational_param(x: f64, what: &str) -> Result<Rational> {
    if x.is_infinite() {
        return Err(Error::InvalidParameter(format!("{what} must be finite")));
    }
    rational_from_f64(x)
}

/// `θ = (α + 1/p - 1) / (α + 1/p - 1/2)` and the triple `(2, 2 - θ, θ)`.
pub fn shin_sun_exponent(p: f64, alpha: f64) -> Result<(f64, DiffTriple)> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} < 1")));
    }
    let inv_p = if p.is_infinite() {
        Rational::from_integer(0)
    } else {
        rational_param(p, "p")?.recip()
    };
    let a = rational_param(alpha, "alpha")?;
    let one = Rational::from_integer(1);
    let num = a + inv_p - one;
    if num <= Rational::from_integer(0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1 - 1/p")));
    }
    let theta = num / (num + Rational::new(1, 2));
    let triple = DiffTriple::new(2, Rational::from_integer(2) - theta, theta)?;
    Ok((to_f64(theta), triple))
}

/// `(4, (4p + 3)/(p + 1), 1/(p + 1))`.
pub fn fell_triple(p: f64) -> Result<DiffTriple> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be positive")));
    }
    let p = rational_param(p, "p")?;
    let one = Rational::from_integer(1);
    DiffTriple::new(4, (p * 4 + 3) / (p + one), one / (p + one))
}
