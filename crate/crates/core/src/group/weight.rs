use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{Element, GroupModel};
use crate::error::{Error, Result};

/// Length-based weights `ν(x) = w(l(x))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Weight {
    /// `ν ≡ 1`.
    Constant,
    /// `(1 + l(x))^s`, `s ≥ 0`.
    Polynomial { s: f64 },
    /// `D e^{l(x)^{α₀}}`, `D ≥ 1`, `0 < α₀ < 1`.
    Subexponential { d: f64, alpha0: f64 },
}

impl Weight {
    pub fn polynomial(s: f64) -> Result<Self> {
        Self::Polynomial { s }.validated()
    }

    pub fn subexponential(d: f64, alpha0: f64) -> Result<Self> {
        Self::Subexponential { d, alpha0 }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Weight::Constant => {}
            Weight::Polynomial { s } => {
                if !(s >= 0.0 && s.is_finite()) {
                    return Err(Error::InvalidParameter(format!("polynomial weight exponent {s} < 0")));
                }
            }
            Weight::Subexponential { d, alpha0 } => {
                if !(d >= 1.0 && d.is_finite()) {
                    return Err(Error::InvalidParameter(format!("weight prefactor D = {d} < 1")));
                }
                if !(alpha0 > 0.0 && alpha0 < 1.0) {
                    return Err(Error::InvalidParameter(format!("weight exponent α₀ = {alpha0} outside (0,1)")));
                }
            }
        }
        Ok(self)
    }

    pub fn at_length(&self, l: usize) -> f64 {
        let l = l as f64;
        match *self {
            Weight::Constant => 1.0,
            Weight::Polynomial { s } => (1.0 + l).powf(s),
            Weight::Subexponential { d, alpha0 } => d * l.powf(alpha0).exp(),
        }
    }

    pub fn eval(&self, group: &GroupModel, x: &Element) -> Result<f64> {
        Ok(self.at_length(group.word_length(x)?))
    }

    /// Constant `C` with `ν(xy) ≤ C (ν(x) + ν(y))`, when the weight is polynomial.
    pub fn polynomial_constant(&self) -> Option<f64> {
        match *self {
            Weight::Constant => Some(1.0),
            Weight::Polynomial { s } => Some(2f64.powf(s)),
            Weight::Subexponential { .. } => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant => write!(f, "1"),
            Weight::Polynomial { s } => write!(f, "poly-{s}"),
            Weight::Subexponential { d, alpha0 } => write!(f, "subexp-{d}-{alpha0}"),
        }
    }
}

/// Registry tokens: `1`, `poly-<s>`, `subexp-<α₀>` or `subexp-<D>-<α₀>`.
impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized weight `{s}`"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split('-').collect();
        match parts.as_slice() {
            ["1"] | ["one"] | ["const"] => Ok(Weight::Constant),
            ["poly", e] => Weight::polynomial(num(e)?),
            ["subexp", a] => Weight::subexponential(1.0, num(a)?),
            ["subexp", d, a] => Weight::subexponential(num(d)?, num(a)?),
            _ => Err(bad()),
        }
    }
}
