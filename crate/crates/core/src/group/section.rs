use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{Element, GroupFamily, GroupModel};
use super::weight::Weight;
use crate::error::{Error, Result};

/// A finitely supported function `G → C`, an element of the scalar group algebra.
#[derive(Clone, Debug)]
pub struct WeightedSection {
    group: Arc<GroupModel>,
    terms: BTreeMap<Element, Complex64>,
}

impl PartialEq for WeightedSection {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.terms == other.terms
    }
}

fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

impl WeightedSection {
    pub fn zero(group: Arc<GroupModel>) -> Self {
        Self {
            group,
            terms: BTreeMap::new(),
        }
    }

    pub fn delta(group: Arc<GroupModel>, x: Element) -> Self {
        Self::from_terms(group, [(x, Complex64::new(1.0, 0.0))]).expect("valid element")
    }

    /// Sums duplicate entries and drops zeros.
    pub fn from_terms(
        group: Arc<GroupModel>,
        terms: impl IntoIterator<Item = (Element, Complex64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Element, Complex64> = BTreeMap::new();
        for (x, v) in terms {
            if !group.contains(&x) {
                return Err(Error::InvalidParameter(format!(
                    "{:?} is not an element of {}",
                    x.0,
                    group.family()
                )));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(format!("coefficient at {:?}", x.0)));
            }
            *map.entry(x).or_default() += v;
        }
        map.retain(|_, v| !is_zero(*v));
        Ok(Self { group, terms: map })
    }

    /// Section on `Z` (or `Z/n`) from `(index, value)` pairs.
    pub fn on_integers(group: Arc<GroupModel>, terms: &[(i64, Complex64)]) -> Result<Self> {
        let fam = group.family();
        let conv = |n: i64| -> Element {
            match fam {
                GroupFamily::Cyclic { n: m } => Element(vec![n.rem_euclid(m as i64)]),
                _ => Element(vec![n]),
            }
        };
        Self::from_terms(group, terms.iter().map(|&(n, v)| (conv(n), v)))
    }

    pub fn group(&self) -> &Arc<GroupModel> {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Element, Complex64> {
        &self.terms
    }

    pub fn get(&self, x: &Element) -> Complex64 {
        self.terms.get(x).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_group(&self, other: &Self) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check_group(other)?;
        let mut terms = self.terms.clone();
        for (x, v) in &other.terms {
            *terms.entry(x.clone()).or_default() += v * sign;
        }
        terms.retain(|_, v| !is_zero(*v));
        Ok(Self {
            group: self.group.clone(),
            terms,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut terms: BTreeMap<Element, Complex64> =
            self.terms.iter().map(|(x, v)| (x.clone(), v * s)).collect();
        terms.retain(|_, v| !is_zero(*v));
        Self {
            group: self.group.clone(),
            terms,
        }
    }

    /// `f*(x) = conj(f(x⁻¹))`.
    pub fn adjoint(&self) -> Self {
        Self {
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .map(|(x, v)| (self.group.inverse(x), v.conj()))
                .collect(),
        }
    }

    /// `max |f(x) - f*(x)|`.
    pub fn self_adjoint_defect(&self) -> f64 {
        let adj = self.adjoint();
        let mut d: f64 = 0.0;
        for (x, v) in &self.terms {
            d = d.max((v - adj.get(x)).norm());
        }
        for (x, v) in &adj.terms {
            d = d.max((v - self.get(x)).norm());
        }
        d
    }

    /// `(f * h)(x) = Σ_y f(y) h(y⁻¹x)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_group(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.group.clone()));
        }
        if let Some(dense) = self.convolve_integer_line(other) {
            return Ok(dense);
        }
        let mut acc: HashMap<Element, Complex64> = HashMap::new();
        for (y, a) in &self.terms {
            for (z, b) in &other.terms {
                *acc.entry(self.group.multiply(y, z)).or_default() += a * b;
            }
        }
        let mut terms: BTreeMap<Element, Complex64> = acc.into_iter().collect();
        terms.retain(|_, v| !is_zero(*v));
        Ok(Self {
            group: self.group.clone(),
            terms,
        })
    }

    /// Dense fast path for `Z`: accumulation order matches the generic path.
    fn convolve_integer_line(&self, other: &Self) -> Option<Self> {
        if self.group.family() != (GroupFamily::Lattice { dim: 1 }) {
            return None;
        }
        let (a_lo, a) = dense_line(&self.terms);
        let (b_lo, b) = dense_line(&other.terms);
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if is_zero(x) {
                continue;
            }
            for (o, &y) in out[i..i + b.len()].iter_mut().zip(&b) {
                *o += x * y;
            }
        }
        let lo = a_lo + b_lo;
        let terms = out
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !is_zero(*v))
            .map(|(i, v)| (Element(vec![lo + i as i64]), v))
            .collect();
        Some(Self {
            group: self.group.clone(),
            terms,
        })
    }

    /// `(Σ ν(x)^p |f(x)|^p)^{1/p}`; `p = ∞` gives `max ν(x)|f(x)|`.
    pub fn weighted_lp_norm(&self, weight: &Weight, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponent p = {p} < 1")));
        }
        let mut vals = Vec::with_capacity(self.terms.len());
        for (x, v) in &self.terms {
            vals.push(weight.eval(&self.group, x)? * v.norm());
        }
        Ok(lp_of(&vals, p))
    }

    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        lp_of(&self.terms.values().map(|v| v.norm()).collect::<Vec<_>>(), 2.0)
    }

    /// Largest word length in the support (0 for the zero section).
    pub fn support_radius(&self) -> Result<usize> {
        let mut r = 0;
        for x in self.terms.keys() {
            r = r.max(self.group.word_length(x)?);
        }
        Ok(r)
    }

    /// Drops coefficients below `rel * max |f|`.
    pub fn pruned(&self, rel: f64) -> Self {
        let top = self.terms.values().map(|v| v.norm()).fold(0.0, f64::max);
        self.pruned_below(rel * top)
    }

    /// Drops coefficients with modulus at most `cut`.
    pub fn pruned_below(&self, cut: f64) -> Self {
        Self {
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(_, v)| v.norm() > cut)
                .map(|(x, v)| (x.clone(), *v))
                .collect(),
        }
    }

    /// Coefficients as `(n, value)` for sections on `Z`, `F_1` or `Z/n`.
    pub fn integer_terms(&self) -> Option<Vec<(i64, Complex64)>> {
        match self.group.family() {
            GroupFamily::Lattice { dim: 1 } | GroupFamily::Cyclic { .. } => {
                Some(self.terms.iter().map(|(x, v)| (x.0[0], *v)).collect())
            }
            GroupFamily::Free { rank: 1 } => {
                Some(self.terms.iter().map(|(x, v)| (x.0.iter().sum(), *v)).collect())
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> SectionJson {
        SectionJson {
            group: self.group.family(),
            terms: self
                .terms
                .iter()
                .map(|(x, v)| TermJson {
                    word: self.group.encode(x),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SectionJson) -> Result<Self> {
        let group = Arc::new(GroupModel::new(j.group)?);
        let terms = j
            .terms
            .iter()
            .map(|t| Ok((group.decode(&t.word)?, Complex64::new(t.re, t.im))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(group, terms)
    }
}

fn dense_line(terms: &BTreeMap<Element, Complex64>) -> (i64, Vec<Complex64>) {
    let lo = terms.keys().next().expect("nonempty").0[0];
    let hi = terms.keys().next_back().expect("nonempty").0[0];
    let mut v = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (x, c) in terms {
        v[(x.0[0] - lo) as usize] = *c;
    }
    (lo, v)
}

pub(crate) fn lp_of(vals: &[f64], p: f64) -> f64 {
    let top = vals.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    if p == 1.0 {
        return vals.iter().sum();
    }
    top * vals.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub fn convolve(f: &WeightedSection, h: &WeightedSection) -> Result<WeightedSection> {
    f.convolve(h)
}

pub fn section_adjoint(f: &WeightedSection) -> WeightedSection {
    f.adjoint()
}

pub fn weighted_lp_norm(f: &WeightedSection, weight: &Weight, p: f64) -> Result<f64> {
    f.weighted_lp_norm(weight, p)
}

/// Wire format of a section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionJson {
    pub group: GroupFamily,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub word: String,
    pub re: f64,
    pub im: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z1() -> Arc<GroupModel> {
        Arc::new(GroupModel::lattice(1))
    }

    #[test]
    fn unit_and_delta_products() {
        let g = Arc::new(GroupModel::free(2));
        let phi = WeightedSection::from_terms(
            g.clone(),
            [(Element(vec![1, 2]), c(0.5, -1.0)), (Element(vec![-2]), c(2.0, 0.0))],
        )
        .unwrap();
        let e = WeightedSection::delta(g.clone(), g.identity());
        assert_eq!(e.convolve(&phi).unwrap(), phi);
        assert_eq!(phi.convolve(&e).unwrap(), phi);
        let x = Element(vec![1, -2]);
        let y = Element(vec![2, 2]);
        let dx = WeightedSection::delta(g.clone(), x.clone());
        let dy = WeightedSection::delta(g.clone(), y.clone());
        assert_eq!(
            dx.convolve(&dy).unwrap(),
            WeightedSection::delta(g.clone(), g.multiply(&x, &y))
        );
    }

    #[test]
    fn integer_convolution_matches_double_sum() {
        let g = z1();
        let f = WeightedSection::on_integers(g.clone(), &[(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let sq = f.convolve(&f).unwrap();
        let want =
            WeightedSection::on_integers(g, &[(0, c(1.0, 0.0)), (1, c(2.0, 0.0)), (2, c(1.0, 0.0))]).unwrap();
        assert_eq!(sq, want);
    }

    #[test]
    fn dense_path_agrees_with_generic_path() {
        // Z through the dense path versus F_1 through the hash path.
        let zs = z1();
        let f1 = Arc::new(GroupModel::free(1));
        let a: Vec<(i64, Complex64)> = (-3..=4).map(|n| (n, c(n as f64 * 0.3 + 1.0, 0.2 * n as f64))).collect();
        let b: Vec<(i64, Complex64)> = (-2..=2).map(|n| (n, c(1.0 - n as f64, 0.7))).collect();
        let to_free = |v: &[(i64, Complex64)]| {
            WeightedSection::from_terms(
                f1.clone(),
                v.iter().map(|&(n, z)| (Element(vec![n.signum(); n.unsigned_abs() as usize]), z)),
            )
            .unwrap()
        };
        let dense = WeightedSection::on_integers(zs.clone(), &a)
            .unwrap()
            .convolve(&WeightedSection::on_integers(zs, &b).unwrap())
            .unwrap();
        let generic = to_free(&a).convolve(&to_free(&b)).unwrap();
        let mut lhs = dense.integer_terms().unwrap();
        let mut rhs = generic.integer_terms().unwrap();
        lhs.sort_by_key(|t| t.0);
        rhs.sort_by_key(|t| t.0);
        assert_eq!(lhs.len(), rhs.len());
        for (x, y) in lhs.iter().zip(&rhs) {
            assert_eq!(x.0, y.0);
            assert!((x.1 - y.1).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_examples() {
        let g = z1();
        let e = WeightedSection::delta(g.clone(), g.identity());
        assert_eq!(e.adjoint(), e);
        let f = WeightedSection::on_integers(g.clone(), &[(1, c(0.0, 1.0))]).unwrap();
        let want = WeightedSection::on_integers(g, &[(-1, c(0.0, -1.0))]).unwrap();
        assert_eq!(f.adjoint(), want);
    }

    #[test]
    fn adjoint_is_antimultiplicative_on_free_group() {
        let g = Arc::new(GroupModel::free(2));
        let ball = g.ball(3).unwrap();
        let f = WeightedSection::from_terms(
            g.clone(),
            ball.iter().enumerate().map(|(i, x)| (x.clone(), c((i % 7) as f64 - 3.0, (i % 5) as f64))),
        )
        .unwrap();
        assert_eq!(f.adjoint().adjoint(), f);
        let h = WeightedSection::from_terms(
            g.clone(),
            ball.iter().take(20).enumerate().map(|(i, x)| (x.clone(), c(1.0, i as f64))),
        )
        .unwrap();
        // Integer-valued coefficients keep every sum exact.
        let lhs = f.convolve(&h).unwrap().adjoint();
        let rhs = h.adjoint().convolve(&f.adjoint()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn weighted_norm_examples() {
        let g = z1();
        for w in [Weight::Constant, Weight::Polynomial { s: 3.0 }, Weight::Subexponential { d: 1.0, alpha0: 0.5 }] {
            for p in [1.0, 2.0, 7.5] {
                let e = WeightedSection::delta(g.clone(), g.identity());
                assert_eq!(e.weighted_lp_norm(&w, p).unwrap(), 1.0);
            }
        }
        let d1 = WeightedSection::on_integers(g.clone(), &[(1, c(1.0, 0.0))]).unwrap();
        assert_eq!(d1.weighted_lp_norm(&Weight::Polynomial { s: 2.0 }, 1.0).unwrap(), 4.0);
        let f = WeightedSection::on_integers(g, &[(-1, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let v = f.weighted_lp_norm(&Weight::Subexponential { d: 1.0, alpha0: 0.5 }, 2.0).unwrap();
        assert!((v - 2f64.sqrt() * std::f64::consts::E).abs() < 1e-14);
        assert!(f.weighted_lp_norm(&Weight::Constant, 0.5).is_err());
    }

    #[test]
    fn mismatched_groups_rejected() {
        let a = WeightedSection::delta(z1(), Element(vec![0]));
        let b = WeightedSection::delta(Arc::new(GroupModel::lattice(2)), Element(vec![0, 0]));
        assert!(matches!(a.convolve(&b), Err(Error::GroupMismatch)));
    }

    #[test]
    fn json_round_trip() {
        let g = Arc::new(GroupModel::free(2));
        let f = WeightedSection::from_terms(g, [(Element(vec![1, -2, 1]), c(0.25, -1.5))]).unwrap();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        assert!(s.contains("\"+1 -2 +1\""));
        let back = WeightedSection::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_section() -> impl Strategy<Value = WeightedSection> {
            let g = Arc::new(GroupModel::free(2));
            let ball = g.ball(2).unwrap();
            let n = ball.len();
            prop::collection::vec((0..n, -2.0f64..2.0, -2.0f64..2.0), 1..8).prop_map(move |v| {
                WeightedSection::from_terms(g.clone(), v.into_iter().map(|(i, a, b)| (ball[i].clone(), c(a, b))))
                    .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn weighted_l1_is_submultiplicative(f in arb_section(), h in arb_section(), s in 0.0f64..4.0) {
                for w in [Weight::Constant, Weight::Polynomial { s }, Weight::Subexponential { d: 1.0, alpha0: 0.5 }] {
                    let fh = f.convolve(&h).unwrap();
                    let lhs = fh.weighted_lp_norm(&w, 1.0).unwrap();
                    let rhs = f.weighted_lp_norm(&w, 1.0).unwrap() * h.weighted_lp_norm(&w, 1.0).unwrap();
                    prop_assert!(lhs <= rhs + 1e-9);
                }
            }

            #[test]
            fn convolution_is_bilinear(f in arb_section(), g in arb_section(), h in arb_section()) {
                let lhs = f.add(&g).unwrap().convolve(&h).unwrap();
                let rhs = f.convolve(&h).unwrap().add(&g.convolve(&h).unwrap()).unwrap();
                prop_assert!(lhs.sub(&rhs).unwrap().l1_norm() <= 1e-12 * (1.0 + rhs.l1_norm()));
            }
        }
    }
}
