use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decay::{beurling_norm, bgs_norm, groschur_norm};
use super::trig::{deriv_domain_norm, TrigJson, TrigPolynomial};
use super::triple::{fell_triple, shin_sun_exponent, DiffTriple, Rational};
use crate::error::{Error, Result};
use crate::group::{cstar_norm_abelian, regular_rep_norm, GroupFamily, GroupModel, SectionJson, Weight, WeightedSection};
use crate::matrix::{operator_norm, schatten_norm, ComplexMatrix, MatrixJson};

/// Elements of the three carriers.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraElement {
    Matrix(ComplexMatrix),
    Section(WeightedSection),
    Trig(TrigPolynomial),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Carrier {
    Matrix,
    Section,
    Trig,
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Carrier::Matrix => "matrix",
            Carrier::Section => "weighted-section",
            Carrier::Trig => "trig-polynomial",
        })
    }
}

impl AlgebraElement {
    pub fn carrier(&self) -> Carrier {
        match self {
            AlgebraElement::Matrix(_) => Carrier::Matrix,
            AlgebraElement::Section(_) => Carrier::Section,
            AlgebraElement::Trig(_) => Carrier::Trig,
        }
    }

    pub fn as_matrix(&self) -> Option<&ComplexMatrix> {
        match self {
            AlgebraElement::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_section(&self) -> Option<&WeightedSection> {
        match self {
            AlgebraElement::Section(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPolynomial> {
        match self {
            AlgebraElement::Trig(t) => Some(t),
            _ => None,
        }
    }

    fn mismatch(&self, other: &Self) -> Error {
        Error::Unsupported {
            op: "mixed-carrier arithmetic",
            carrier: format!("{} with {}", self.carrier(), other.carrier()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Matrix(a), Self::Matrix(b)) => Ok(Self::Matrix(a.matmul(b)?)),
            (Self::Section(a), Self::Section(b)) => Ok(Self::Section(a.convolve(b)?)),
            (Self::Trig(a), Self::Trig(b)) => Ok(Self::Trig(a.mul(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Matrix(a), Self::Matrix(b)) => Ok(Self::Matrix(a.try_add(b)?)),
            (Self::Section(a), Self::Section(b)) => Ok(Self::Section(a.add(b)?)),
            (Self::Trig(a), Self::Trig(b)) => Ok(Self::Trig(a.add(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Matrix(a), Self::Matrix(b)) => Ok(Self::Matrix(a.try_sub(b)?)),
            (Self::Section(a), Self::Section(b)) => Ok(Self::Section(a.sub(b)?)),
            (Self::Trig(a), Self::Trig(b)) => Ok(Self::Trig(a.sub(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            Self::Matrix(a) => Self::Matrix(a.scale(s)),
            Self::Section(a) => Self::Section(a.scale(s)),
            Self::Trig(a) => Self::Trig(a.scale(s)),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        match self {
            Self::Matrix(a) => Self::Matrix(a.adjoint()),
            Self::Section(a) => Self::Section(a.adjoint()),
            Self::Trig(a) => Self::Trig(a.adjoint()),
        }
    }

    /// Unit of the carrier containing `self`.
    pub fn unit(&self) -> Self {
        match self {
            Self::Matrix(a) => Self::Matrix(ComplexMatrix::identity(a.dim())),
            Self::Section(a) => Self::Section(WeightedSection::delta(a.group().clone(), a.group().identity())),
            Self::Trig(_) => Self::Trig(TrigPolynomial::constant(Complex64::new(1.0, 0.0))),
        }
    }

    pub fn zero_like(&self) -> Self {
        self.scale_real(0.0)
    }

    /// Largest coefficient of `x - x*`.
    pub fn self_adjoint_defect(&self) -> f64 {
        match self {
            Self::Matrix(a) => a.max_abs_diff(&a.adjoint()),
            Self::Section(a) => a.self_adjoint_defect(),
            Self::Trig(a) => a
                .sub(&a.adjoint())
                .coefficients()
                .values()
                .map(|c| c.norm())
                .fold(0.0, f64::max),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        match self {
            Self::Matrix(a) => a.max_abs(),
            Self::Section(a) => a.terms().values().map(|c| c.norm()).fold(0.0, f64::max),
            Self::Trig(a) => a.coefficients().values().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn to_json(&self) -> ElementJson {
        match self {
            Self::Matrix(a) => ElementJson::Matrix(a.into()),
            Self::Section(a) => ElementJson::Section(a.to_json()),
            Self::Trig(a) => ElementJson::Trig(a.to_json()),
        }
    }

    pub fn from_json(j: &ElementJson) -> Result<Self> {
        Ok(match j {
            ElementJson::Matrix(m) => Self::Matrix(m.clone().try_into()?),
            ElementJson::Section(s) => Self::Section(WeightedSection::from_json(s)?),
            ElementJson::Trig(t) => Self::Trig(TrigPolynomial::from_json(t)?),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ElementJson {
    Matrix(MatrixJson),
    Section(SectionJson),
    Trig(TrigJson),
}

/// The norm pair of an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraKind {
    /// Operator norm on both sides.
    CStar,
    Schatten { p: f64 },
    GroSchur { p: f64, alpha: f64 },
    Bgs { p: f64, alpha: f64 },
    Beurling { p: f64, alpha: f64 },
    WeightedL1 { group: GroupFamily, weight: Weight },
    WeightedL2 { group: GroupFamily, weight: Weight },
    C1Torus,
    Hilbert { n: u64 },
}

/// A named pair `(A, ‖·‖_A) ⊂ (B, ‖·‖_B)` with its declared exponents.
#[derive(Clone, Debug)]
pub struct AlgebraInstance {
    name: String,
    kind: AlgebraKind,
    declared: Option<DiffTriple>,
    group: Option<Arc<GroupModel>>,
}

/// Ball sizes used for regular-representation lower bounds of C*-norms.
const B_NORM_BALL_LIMIT: u128 = 60_000;

fn parse_exponent(s: &str) -> Result<f64> {
    match s {
        "inf" | "infty" | "∞" => Ok(f64::INFINITY),
        _ => s.parse().map_err(|_| Error::Parse(format!("`{s}` is not a number"))),
    }
}

/// Group tokens: `z`, `z2`, `z^3`, `f2`, `f_3`, `h3`, `heisenberg`, `c5`, `z/5`.
pub fn parse_group(s: &str) -> Result<GroupFamily> {
    let t = s.to_ascii_lowercase();
    let bad = || Error::Parse(format!("unrecognized group `{s}`"));
    let num = |x: &str| x.parse::<u64>().map_err(|_| bad());
    if t == "z" {
        return Ok(GroupFamily::Lattice { dim: 1 });
    }
    if t == "h3" || t == "heisenberg" {
        return Ok(GroupFamily::Heisenberg);
    }
    if let Some(n) = t.strip_prefix("z/") {
        return Ok(GroupFamily::Cyclic { n: num(n)? });
    }
    if let Some(d) = t.strip_prefix("z^").or_else(|| t.strip_prefix('z')) {
        return Ok(GroupFamily::Lattice { dim: num(d)? as usize });
    }
    if let Some(k) = t.strip_prefix("f_").or_else(|| t.strip_prefix('f')) {
        return Ok(GroupFamily::Free { rank: num(k)? as usize });
    }
    if let Some(n) = t.strip_prefix('c') {
        return Ok(GroupFamily::Cyclic { n: num(n)? });
    }
    Err(bad())
}

/// Polynomial growth degree of the supported families.
fn growth_degree(g: GroupFamily) -> Option<f64> {
    match g {
        GroupFamily::Lattice { dim } => Some(dim as f64),
        GroupFamily::Heisenberg => Some(4.0),
        GroupFamily::Cyclic { .. } => Some(0.0),
        GroupFamily::Free { rank: 1 } => Some(1.0),
        GroupFamily::Free { .. } => None,
    }
}

/// Registry patterns with one-line descriptions.
pub fn registry() -> Vec<(&'static str, &'static str)> {
    vec![
        ("cstar", "operator norm on both sides (matrices)"),
        ("schatten:p", "Schatten p-norm over the operator norm, p in [1, inf)"),
        ("jaffard:alpha", "sup |a(i,j)| (1+|i-j|)^alpha over the operator norm"),
        ("groschur:p:alpha", "Groechenig-Schur row/column norm over the operator norm"),
        ("bgs:p:alpha", "Baskakov-Gohberg-Sjoestrand diagonal norm over the operator norm"),
        ("beurling:p:alpha", "Beurling tail-sup norm over the operator norm"),
        ("l1w:group:weight", "weighted l1 group algebra over the reduced C*-norm"),
        ("l2w:group:weight", "weighted l2 group algebra over the reduced C*-norm"),
        ("c1-torus", "sup |f| + sup |f'| over sup |f| for trigonometric polynomials"),
        ("hilbert:cyclic:n", "l2 norm plus convolution operator norm on Z/n"),
    ]
}

impl AlgebraInstance {
    pub fn new(name: impl Into<String>, kind: AlgebraKind) -> Result<Self> {
        let group = match &kind {
            AlgebraKind::WeightedL1 { group, weight } | AlgebraKind::WeightedL2 { group, weight } => {
                weight.validated()?;
                Some(Arc::new(GroupModel::new(*group)?))
            }
            AlgebraKind::Hilbert { n } => Some(Arc::new(GroupModel::new(GroupFamily::Cyclic { n: *n })?)),
            _ => None,
        };
        let check_p = |p: f64| {
            if p >= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("p = {p} < 1")))
            }
        };
        let check_alpha = |a: f64| {
            if a >= 0.0 && a.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("alpha = {a} must be a nonnegative number")))
            }
        };
        let one = Rational::from_integer(1);
        let declared = match &kind {
            AlgebraKind::CStar => Some(DiffTriple::new(2, one, one)?.with_constant(1.0)),
            AlgebraKind::Schatten { p } => {
                check_p(*p)?;
                Some(DiffTriple::new(2, one, one)?.with_constant(1.0))
            }
            AlgebraKind::GroSchur { p, alpha } | AlgebraKind::Bgs { p, alpha } | AlgebraKind::Beurling { p, alpha } => {
                check_p(*p)?;
                check_alpha(*alpha)?;
                shin_sun_exponent(*p, *alpha).ok().map(|(_, t)| t)
            }
            AlgebraKind::WeightedL1 { group, weight } => match (weight, growth_degree(*group)) {
                // The least integer p with Σ ν^{-p} < ∞.
                (Weight::Polynomial { s }, Some(d)) if *s > 0.0 => Some(fell_triple((d / s).floor() + 1.0)?),
                _ => None,
            },
            AlgebraKind::WeightedL2 { weight, .. } => match weight {
                Weight::Polynomial { s } if *s > 0.0 => Some(DiffTriple::new(2, one, one)?),
                _ => None,
            },
            AlgebraKind::C1Torus => Some(DiffTriple::new(2, one, one)?.with_constant(2.0)),
            AlgebraKind::Hilbert { .. } => Some(DiffTriple::new(2, one, one)?.with_constant(1.0)),
        };
        Ok(Self {
            name: name.into(),
            kind,
            declared,
            group,
        })
    }

    /// Resolves a registry name such as `jaffard:2` or `l1w:z:poly-2`.
    pub fn from_name(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownInstance(name.to_string());
        let parts: Vec<&str> = name.split(':').collect();
        let kind = match parts.as_slice() {
            ["cstar"] => AlgebraKind::CStar,
            ["schatten", p] => {
                let p = parse_exponent(p)?;
                if p.is_infinite() {
                    return Err(Error::InvalidParameter("Schatten classes need p < inf".into()));
                }
                AlgebraKind::Schatten { p }
            }
            ["jaffard", a] => AlgebraKind::GroSchur {
                p: f64::INFINITY,
                alpha: parse_exponent(a)?,
            },
            ["groschur", p, a] => AlgebraKind::GroSchur {
                p: parse_exponent(p)?,
                alpha: parse_exponent(a)?,
            },
            ["bgs", p, a] => AlgebraKind::Bgs {
                p: parse_exponent(p)?,
                alpha: parse_exponent(a)?,
            },
            ["beurling", p, a] => AlgebraKind::Beurling {
                p: parse_exponent(p)?,
                alpha: parse_exponent(a)?,
            },
            ["l1w", g, w] => AlgebraKind::WeightedL1 {
                group: parse_group(g)?,
                weight: w.parse()?,
            },
            ["l2w", g, w] => AlgebraKind::WeightedL2 {
                group: parse_group(g)?,
                weight: w.parse()?,
            },
            ["c1-torus"] => AlgebraKind::C1Torus,
            ["hilbert", "cyclic", n] => AlgebraKind::Hilbert {
                n: n.parse().map_err(|_| unknown())?,
            },
            _ => return Err(unknown()),
        };
        Self::new(name, kind)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &AlgebraKind {
        &self.kind
    }

    pub fn declared(&self) -> Option<&DiffTriple> {
        self.declared.as_ref()
    }

    pub fn group(&self) -> Option<&Arc<GroupModel>> {
        self.group.as_ref()
    }

    pub fn carrier(&self) -> Carrier {
        match self.kind {
            AlgebraKind::WeightedL1 { .. } | AlgebraKind::WeightedL2 { .. } | AlgebraKind::Hilbert { .. } => {
                Carrier::Section
            }
            AlgebraKind::C1Torus => Carrier::Trig,
            _ => Carrier::Matrix,
        }
    }

    /// Involution constant `κ` with `‖x*‖_A ≤ κ ‖x‖_A`.
    pub fn involution_constant(&self) -> f64 {
        1.0
    }

    /// Whether `‖xy‖_A ≤ ‖x‖_A ‖y‖_A` holds without a constant.
    pub fn is_submultiplicative(&self) -> bool {
        match self.kind {
            AlgebraKind::GroSchur { p, .. } | AlgebraKind::Bgs { p, .. } | AlgebraKind::Beurling { p, .. } => p == 1.0,
            AlgebraKind::WeightedL2 { .. } => false,
            _ => true,
        }
    }

    /// Whether `‖x‖_A ≥ ‖x‖_B` holds without a constant.
    pub fn dominates_b(&self) -> bool {
        match self.kind {
            AlgebraKind::GroSchur { p, .. } | AlgebraKind::Bgs { p, .. } | AlgebraKind::Beurling { p, .. } => p == 1.0,
            AlgebraKind::WeightedL2 { .. } => false,
            _ => true,
        }
    }

    /// Whether `b_norm` is exact (not a lower bound).
    pub fn b_norm_is_exact(&self) -> bool {
        match &self.kind {
            AlgebraKind::WeightedL1 { group, .. } | AlgebraKind::WeightedL2 { group, .. } => {
                matches!(group, GroupFamily::Lattice { .. } | GroupFamily::Cyclic { .. } | GroupFamily::Free { rank: 1 })
            }
            _ => true,
        }
    }

    fn wrong_carrier(&self, x: &AlgebraElement) -> Error {
        Error::Unsupported {
            op: "norm evaluation",
            carrier: format!("{} in instance {}", x.carrier(), self.name),
        }
    }

    pub fn check_element(&self, x: &AlgebraElement) -> Result<()> {
        if x.carrier() != self.carrier() {
            return Err(self.wrong_carrier(x));
        }
        if let (Some(g), AlgebraElement::Section(s)) = (&self.group, x) {
            if **g != **s.group() {
                return Err(Error::GroupMismatch);
            }
        }
        Ok(())
    }

    pub fn a_norm(&self, x: &AlgebraElement) -> Result<f64> {
        self.check_element(x)?;
        match (&self.kind, x) {
            (AlgebraKind::CStar, AlgebraElement::Matrix(a)) => Ok(operator_norm(a)),
            (AlgebraKind::Schatten { p }, AlgebraElement::Matrix(a)) => schatten_norm(a, *p),
            (AlgebraKind::GroSchur { p, alpha }, AlgebraElement::Matrix(a)) => groschur_norm(a, *p, *alpha),
            (AlgebraKind::Bgs { p, alpha }, AlgebraElement::Matrix(a)) => bgs_norm(a, *p, *alpha),
            (AlgebraKind::Beurling { p, alpha }, AlgebraElement::Matrix(a)) => beurling_norm(a, *p, *alpha),
            (AlgebraKind::WeightedL1 { weight, .. }, AlgebraElement::Section(f)) => f.weighted_lp_norm(weight, 1.0),
            (AlgebraKind::WeightedL2 { weight, .. }, AlgebraElement::Section(f)) => f.weighted_lp_norm(weight, 2.0),
            (AlgebraKind::C1Torus, AlgebraElement::Trig(f)) => Ok(deriv_domain_norm(f)),
            (AlgebraKind::Hilbert { .. }, AlgebraElement::Section(f)) => hilbert_algebra_norm(f),
            _ => Err(self.wrong_carrier(x)),
        }
    }

    /// The C*-norm; for non-abelian groups the regular-representation lower bound on a ball.
    pub fn b_norm(&self, x: &AlgebraElement) -> Result<f64> {
        self.check_element(x)?;
        match x {
            AlgebraElement::Matrix(a) => Ok(operator_norm(a)),
            AlgebraElement::Trig(f) => Ok(f.sup_norm()),
            AlgebraElement::Section(f) => section_cstar_norm(f),
        }
    }

    /// Machine-readable description for reports.
    pub fn descriptor(&self) -> serde_json::Value {
        let window = match self.carrier() {
            Carrier::Matrix => Some("index window {0..n-1}, n = element dimension"),
            _ => None,
        };
        serde_json::json!({
            "name": self.name,
            "carrier": self.carrier(),
            "declared": self.declared.as_ref().map(super::triple::DiffTripleJson::from),
            "involution_constant": self.involution_constant(),
            "window": window,
            "measure": matches!(self.kind, AlgebraKind::Hilbert { .. }).then_some("counting"),
            "b_norm": if self.b_norm_is_exact() { "exact" } else { "regular-representation lower bound" },
        })
    }
}

/// C*-norm of a section: Fourier sup for abelian groups, ball compression otherwise.
pub fn section_cstar_norm(f: &WeightedSection) -> Result<f64> {
    let g = f.group();
    if g.is_abelian() || g.family() == (GroupFamily::Free { rank: 1 }) {
        return cstar_norm_abelian(f);
    }
    let base = f.support_radius()?;
    let mut r = 2 * base + 4;
    if let GroupFamily::Free { rank } = g.family() {
        let q = 2 * rank as u128 - 1;
        let size = |r: usize| 1 + 2 * rank as u128 * (q.pow(r as u32) - 1) / (q - 1);
        while r > base && size(r) > B_NORM_BALL_LIMIT {
            r -= 1;
        }
    } else {
        r = r.min(12);
    }
    regular_rep_norm(f, r)
}

/// `‖f‖₂ + ‖L_f‖` on a finite group with counting measure.
pub fn hilbert_algebra_norm(f: &WeightedSection) -> Result<f64> {
    if !f.group().is_finite() {
        return Err(Error::Unsupported {
            op: "hilbert_algebra_norm",
            carrier: f.group().family().to_string(),
        });
    }
    Ok(f.l2_norm() + cstar_norm_abelian(f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Element;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn registry_resolves() {
        for name in [
            "cstar",
            "schatten:1",
            "schatten:2.5",
            "jaffard:2",
            "groschur:1:1",
            "bgs:2:1.5",
            "beurling:inf:2",
            "l1w:z:poly-2",
            "l1w:z2:subexp-0.5",
            "l2w:f2:poly-3",
            "l1w:h3:1",
            "c1-torus",
            "hilbert:cyclic:5",
        ] {
            let inst = AlgebraInstance::from_name(name).unwrap();
            assert_eq!(inst.name(), name);
        }
        for bad in ["nope", "schatten:0.5", "schatten:inf", "l1w:q:1", "hilbert:cyclic:x", "jaffard:-1"] {
            assert!(AlgebraInstance::from_name(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn declared_triples() {
        let t = *AlgebraInstance::from_name("jaffard:2").unwrap().declared().unwrap();
        assert_eq!((t.p(), t.q()), (Rational::new(4, 3), Rational::new(2, 3)));
        let t = *AlgebraInstance::from_name("l1w:z:poly-2").unwrap().declared().unwrap();
        assert_eq!((t.k(), t.p(), t.q()), (4, Rational::new(7, 2), Rational::new(1, 2)));
        assert!(AlgebraInstance::from_name("groschur:1:0").unwrap().declared().is_none());
        assert!(AlgebraInstance::from_name("l1w:f2:poly-2").unwrap().declared().is_none());
        assert_eq!(AlgebraInstance::from_name("c1-torus").unwrap().declared().unwrap().c_estimate, Some(2.0));
    }

    #[test]
    fn hilbert_examples() {
        let inst = AlgebraInstance::from_name("hilbert:cyclic:5").unwrap();
        let g = inst.group().unwrap().clone();
        let e = AlgebraElement::Section(WeightedSection::delta(g.clone(), g.identity()));
        assert!((inst.a_norm(&e).unwrap() - 2.0).abs() < 1e-14);
        let u = WeightedSection::on_integers(g.clone(), &(0..5).map(|n| (n, c(0.2))).collect::<Vec<_>>()).unwrap();
        let want = 1.0 / 5f64.sqrt() + 1.0;
        assert!((inst.a_norm(&AlgebraElement::Section(u)).unwrap() - want).abs() < 1e-14);
        assert_eq!(inst.a_norm(&e.zero_like()).unwrap(), 0.0);
        let z = WeightedSection::delta(Arc::new(GroupModel::lattice(1)), Element(vec![0]));
        assert!(hilbert_algebra_norm(&z).is_err());
    }

    #[test]
    fn carrier_checks() {
        let inst = AlgebraInstance::from_name("l1w:z:poly-2").unwrap();
        assert!(inst.a_norm(&AlgebraElement::Matrix(ComplexMatrix::identity(2))).is_err());
        let other = WeightedSection::delta(Arc::new(GroupModel::lattice(2)), Element(vec![0, 0]));
        assert!(inst.a_norm(&AlgebraElement::Section(other)).is_err());
    }

    #[test]
    fn free_group_b_norm_is_lower_bound_of_l1() {
        let inst = AlgebraInstance::from_name("l1w:f2:1").unwrap();
        let g = inst.group().unwrap().clone();
        let gens: Vec<(Element, Complex64)> = g.generators().iter().map(|x| (x.clone(), c(1.0))).collect();
        let f = AlgebraElement::Section(WeightedSection::from_terms(g, gens).unwrap());
        let b = inst.b_norm(&f).unwrap();
        assert!(b <= 2.0 * 3f64.sqrt() + 1e-12);
        assert!(b > 3.2, "{b}");
        assert_eq!(inst.a_norm(&f).unwrap(), 4.0);
    }

    #[test]
    fn element_json_round_trip() {
        let g = Arc::new(GroupModel::free(2));
        let x = AlgebraElement::Section(WeightedSection::delta(g, Element(vec![1, -2])));
        let s = serde_json::to_string(&x.to_json()).unwrap();
        let back = AlgebraElement::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, x);
        let m = AlgebraElement::Matrix(ComplexMatrix::identity(2));
        let s = serde_json::to_string(&m.to_json()).unwrap();
        assert!(s.starts_with("{\"matrix\""));
    }
}
