//! Fourier profiles, the weighted norm `∫|f̂| e^{|t|^τ}` and the functional
//! calculus `f(a) = (1/2π) ∫ f̂(t) e^{ita} dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraInstance, AlgebraKind, TrigPolynomial};
use crate::error::{Error, Result};
use crate::group::torus::{section_from_lattice, torus_view, TorusView};
use crate::group::Weight;
use crate::growth::converged_grid;
use crate::matrix::{hermitian_eig, operator_norm, ComplexMatrix};
use crate::quad::{adaptive_pieces, composite_nodes};
use crate::spectral::spectrum_b;

const SQRT_PI: f64 = 1.772_453_850_905_516;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Certified decay `|f̂(t)| ≤ c e^{-rate |t|}` outside a tabulated grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailSpec {
    pub c: f64,
    pub rate: f64,
}

/// `weight · g(x − shift)`, with transform `weight · e^{-it·shift} ĝ(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftedTerm {
    pub weight: f64,
    #[serde(default)]
    pub shift: f64,
    pub profile: FourierProfile,
}

/// A function on the line described through its Fourier transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FourierProfile {
    /// `f̂(t) = e^{-σ²t²}`.
    Gaussian { sigma: f64 },
    /// `f̂ = 1` on `[-T, T]`.
    Box {
        #[serde(rename = "T")]
        t: f64,
    },
    /// `f̂(t) = (1 − |t|/T)_+`.
    Hat {
        #[serde(rename = "T")]
        t: f64,
    },
    /// Piecewise linear `f̂` through `(grid, values)`, with a certified bound on
    /// the part outside the grid.
    Tabulated {
        grid: Vec<f64>,
        values: Vec<[f64; 2]>,
        #[serde(default)]
        tail: Option<TailSpec>,
    },
    Sum { terms: Vec<ShiftedTerm> },
    /// Pointwise product; the transform is `(1/2π) f̂ * ĝ`.
    Product { factors: Vec<FourierProfile> },
}

impl FourierProfile {
    pub fn gaussian(sigma: f64) -> Self {
        Self::Gaussian { sigma }
    }

    pub fn box_(t: f64) -> Self {
        Self::Box { t }
    }

    pub fn hat(t: f64) -> Self {
        Self::Hat { t }
    }

    /// `A [G(x − 1) − G(x + 1)]` for the Gaussian profile `G` of width `σ`,
    /// normalized so that `f(0) = 0` and `f(1) = 1`.
    pub fn unit_bump(sigma: f64) -> Self {
        let a = 2.0 * sigma * SQRT_PI / (1.0 - (-1.0 / (sigma * sigma)).exp());
        let g = Self::gaussian(sigma);
        Self::Sum {
            terms: vec![
                ShiftedTerm {
                    weight: a,
                    shift: 1.0,
                    profile: g.clone(),
                },
                ShiftedTerm {
                    weight: -a,
                    shift: -1.0,
                    profile: g,
                },
            ],
        }
    }

    /// `f·g`, in closed form when both factors are shifted Gaussian sums.
    pub fn product(f: &Self, g: &Self) -> Result<Self> {
        f.validate()?;
        g.validate()?;
        if let (Some(a), Some(b)) = (f.gaussian_terms(), g.gaussian_terms()) {
            let mut terms = Vec::new();
            for &(w1, s1, sa) in &a {
                for &(w2, s2, sb) in &b {
                    let (al, be) = (1.0 / (4.0 * sa * sa), 1.0 / (4.0 * sb * sb));
                    let sc = 1.0 / (2.0 * (al + be).sqrt());
                    let m = (al * s1 + be * s2) / (al + be);
                    let k = (-al * be / (al + be) * (s1 - s2).powi(2)).exp();
                    terms.push(ShiftedTerm {
                        weight: w1 * w2 * k * sc / (2.0 * sa * sb * SQRT_PI),
                        shift: m,
                        profile: Self::gaussian(sc),
                    });
                }
            }
            return Ok(Self::Sum { terms });
        }
        let p = Self::Product {
            factors: vec![f.clone(), g.clone()],
        };
        p.validate()?;
        Ok(p)
    }

    /// `(weight, shift, σ)` triples when the profile is a sum of shifted Gaussians.
    fn gaussian_terms(&self) -> Option<Vec<(f64, f64, f64)>> {
        match self {
            Self::Gaussian { sigma } => Some(vec![(1.0, 0.0, *sigma)]),
            Self::Sum { terms } => {
                let mut out = Vec::new();
                for t in terms {
                    for (w, s, sg) in t.profile.gaussian_terms()? {
                        out.push((t.weight * w, t.shift + s, sg));
                    }
                }
                Some(out)
            }
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            Self::Gaussian { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => bad(format!("gaussian σ = {sigma}")),
            Self::Box { t } | Self::Hat { t } if !(*t > 0.0 && t.is_finite()) => bad(format!("profile half-width T = {t}")),
            Self::Tabulated { grid, values, tail } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return bad("tabulated profile needs matching grid and values of length ≥ 2".into());
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) || !grid.iter().all(|g| g.is_finite()) {
                    return bad("tabulated grid must be strictly increasing".into());
                }
                if !(grid[0] < 0.0 && grid[grid.len() - 1] > 0.0) {
                    return bad("tabulated grid must straddle 0".into());
                }
                if values.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("tabulated values".into()));
                }
                match tail {
                    None => bad("tabulated profiles require a tail bound".into()),
                    Some(TailSpec { c, rate }) if !(*c >= 0.0 && *rate > 0.0 && c.is_finite()) => {
                        bad(format!("tail bound (c = {c}, rate = {rate})"))
                    }
                    _ => Ok(()),
                }
            }
            Self::Sum { terms } => {
                if terms.is_empty() {
                    return bad("empty profile sum".into());
                }
                for t in terms {
                    if !(t.weight.is_finite() && t.shift.is_finite()) {
                        return Err(Error::NonFinite("profile sum term".into()));
                    }
                    t.profile.validate()?;
                }
                Ok(())
            }
            Self::Product { factors } => {
                if factors.len() != 2 {
                    return bad("products take exactly two factors".into());
                }
                for f in factors {
                    f.validate()?;
                }
                if factors[0].support().is_none() && factors[1].support().is_none() {
                    return Err(Error::Unsupported {
                        op: "numeric profile convolution",
                        carrier: "two non-compact factors".into(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `f̂(t)`.
    pub fn fhat(&self, t: f64) -> Complex64 {
        match self {
            Self::Gaussian { sigma } => c((-(sigma * t).powi(2)).exp()),
            Self::Box { t: w } => c(if t.abs() <= *w { 1.0 } else { 0.0 }),
            Self::Hat { t: w } => c((1.0 - t.abs() / w).max(0.0)),
            Self::Tabulated { grid, values, .. } => {
                let n = grid.len();
                if t < grid[0] || t > grid[n - 1] {
                    return c(0.0);
                }
                let j = grid.partition_point(|g| *g <= t).clamp(1, n - 1);
                let (a, b) = (grid[j - 1], grid[j]);
                let s = (t - a) / (b - a);
                let va = Complex64::new(values[j - 1][0], values[j - 1][1]);
                let vb = Complex64::new(values[j][0], values[j][1]);
                va + (vb - va) * s
            }
            Self::Sum { terms } => terms
                .iter()
                .map(|term| term.weight * Complex64::from_polar(1.0, -t * term.shift) * term.profile.fhat(t))
                .sum(),
            Self::Product { factors } => convolve_at(&factors[0], &factors[1], t),
        }
    }

    /// `f(x)`: closed form where available, quadrature otherwise.
    pub fn value(&self, x: f64) -> Complex64 {
        match self {
            Self::Gaussian { sigma } => c((-(x * x) / (4.0 * sigma * sigma)).exp() / (2.0 * sigma * SQRT_PI)),
            Self::Box { t } => c(if x == 0.0 { t / PI } else { (t * x).sin() / (PI * x) }),
            Self::Hat { t } => {
                let u = t * x / 2.0;
                let s = if u == 0.0 { 1.0 } else { u.sin() / u };
                c(t / (2.0 * PI) * s * s)
            }
            Self::Tabulated { grid, .. } => {
                let f = |t: f64| self.fhat(t) * Complex64::from_polar(1.0, t * x);
                adaptive_pieces(&f, grid, 1e-13).0 / (2.0 * PI)
            }
            Self::Sum { terms } => terms.iter().map(|t| t.weight * t.profile.value(x - t.shift)).sum(),
            Self::Product { factors } => factors[0].value(x) * factors[1].value(x),
        }
    }

    /// Radius of the support of `f̂` when it is compact.
    pub fn support(&self) -> Option<f64> {
        match self {
            Self::Gaussian { .. } => None,
            Self::Box { t } | Self::Hat { t } => Some(*t),
            Self::Tabulated { grid, .. } => Some(grid[0].abs().max(grid[grid.len() - 1])),
            Self::Sum { terms } => terms.iter().try_fold(0.0, |acc: f64, t| Some(acc.max(t.profile.support()?))),
            Self::Product { factors } => Some(factors[0].support()? + factors[1].support()?),
        }
    }

    /// Points where `f̂` may fail to be smooth, always including 0.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match self {
            Self::Gaussian { .. } => vec![],
            Self::Box { t } | Self::Hat { t } => vec![-t, *t],
            Self::Tabulated { grid, .. } => grid.clone(),
            Self::Sum { terms } => terms.iter().flat_map(|t| t.profile.breakpoints()).collect(),
            Self::Product { factors } => {
                if factors.iter().all(|f| f.support().is_some()) {
                    let (a, b) = (factors[0].breakpoints(), factors[1].breakpoints());
                    a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
                } else {
                    vec![]
                }
            }
        };
        out.push(0.0);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    /// Bound on `∫_{|t|>T} |f̂(t)| e^{R|t|} dt`; infinite when none is available.
    pub fn tail_bound(&self, t_cut: f64, r: f64) -> f64 {
        let t_cut = t_cut.max(0.0);
        match self {
            Self::Gaussian { sigma } => {
                let kappa = sigma * sigma * t_cut - r;
                if kappa <= 0.0 {
                    f64::INFINITY
                } else {
                    2.0 * (-kappa * t_cut).exp() / kappa
                }
            }
            Self::Box { .. } | Self::Hat { .. } => self.compact_tail(t_cut, r, 0.0),
            Self::Tabulated { grid, tail, .. } => {
                let Some(TailSpec { c, rate }) = tail else {
                    return f64::INFINITY;
                };
                let outside = if *c == 0.0 {
                    0.0
                } else if *rate <= r {
                    return f64::INFINITY;
                } else {
                    let k = rate - r;
                    c * ((-k * grid[0].abs()).exp() + (-k * grid[grid.len() - 1]).exp()) / k
                };
                self.compact_tail(t_cut, r, outside)
            }
            Self::Sum { terms } => terms.iter().map(|t| t.weight.abs() * t.profile.tail_bound(t_cut, r)).sum(),
            Self::Product { factors } => {
                let (f, g) = (&factors[0], &factors[1]);
                if let (Some(a), Some(b)) = (f.support(), g.support()) {
                    if t_cut >= a + b {
                        return (f.tail_bound(a, r) * g.mass(r) + f.mass(r) * g.tail_bound(b, r)) / (2.0 * PI);
                    }
                }
                (f.tail_bound(t_cut / 2.0, r) * g.mass(r) + f.mass(r) * g.tail_bound(t_cut / 2.0, r)) / (2.0 * PI)
            }
        }
    }

    /// Tail of a compactly supported piecewise-smooth part, plus a certified remainder.
    fn compact_tail(&self, t_cut: f64, r: f64, remainder: f64) -> f64 {
        let s = self.support().expect("compact profile");
        if t_cut >= s {
            return remainder;
        }
        let mut breaks: Vec<f64> = self.breakpoints().into_iter().filter(|b| *b > t_cut && *b < s).collect();
        breaks.insert(0, t_cut);
        breaks.push(s);
        let h = |t: f64| c((self.fhat(t).norm() + self.fhat(-t).norm()) * (r * t).exp());
        let (v, e) = adaptive_pieces(&h, &breaks, 1e-13);
        v.re + e + remainder
    }

    /// Upper bound on `∫ |f̂(t)| e^{R|t|} dt`.
    pub fn mass(&self, r: f64) -> f64 {
        let t_cut = match self.support() {
            Some(s) => s,
            None => {
                let mut t = 1.0;
                while !(self.tail_bound(t, r) <= 1e-14) && t < 1e6 {
                    t *= 2.0;
                }
                t
            }
        };
        let mut breaks: Vec<f64> = self.breakpoints().into_iter().filter(|b| b.abs() < t_cut).collect();
        breaks.insert(0, -t_cut);
        breaks.push(t_cut);
        let h = |t: f64| c(self.fhat(t).norm() * (r * t.abs()).exp());
        let (v, e) = adaptive_pieces(&h, &breaks, 1e-12);
        v.re + e + self.tail_bound(t_cut, r)
    }

    /// Whether `f` is real on the line, i.e. `f̂(−t) = conj f̂(t)`.
    pub fn is_real(&self) -> bool {
        match self {
            Self::Gaussian { .. } | Self::Box { .. } | Self::Hat { .. } => true,
            Self::Tabulated { grid, values, .. } => {
                let n = grid.len();
                (0..n).all(|j| {
                    let k = n - 1 - j;
                    (grid[j] + grid[k]).abs() <= 1e-12 * (1.0 + grid[j].abs())
                        && (values[j][0] - values[k][0]).abs() <= 1e-12
                        && (values[j][1] + values[k][1]).abs() <= 1e-12
                })
            }
            Self::Sum { terms } => terms.iter().all(|t| t.profile.is_real()),
            Self::Product { factors } => factors.iter().all(|f| f.is_real()),
        }
    }
}

/// `(1/2π) ∫ f̂(s) ĝ(t − s) ds`, integrating over the compact factor's support.
fn convolve_at(f: &FourierProfile, g: &FourierProfile, t: f64) -> Complex64 {
    let (f, g) = if f.support().is_some() { (f, g) } else { (g, f) };
    let s = f.support().expect("validated: one compact factor");
    let mut breaks: Vec<f64> = f.breakpoints();
    if g.support().is_some() {
        breaks.extend(g.breakpoints().iter().map(|b| t - b));
    }
    breaks.retain(|b| b.abs() < s);
    breaks.push(-s);
    breaks.push(s);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let h = |u: f64| f.fhat(u) * g.fhat(t - u);
    adaptive_pieces(&h, &breaks, 1e-14).0 / (2.0 * PI)
}

// ---------------------------------------------------------------------------
// The weighted norm

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomarNorm {
    pub value: f64,
    /// Quadrature disagreement plus the tail beyond `t_max`.
    pub error_bound: f64,
    pub t_max: f64,
}

/// Bound on `∫_{|t|>T} |f̂| e^{|t|^τ}` through the tangent line of `t^τ` at `T`.
pub fn domar_tail(f: &FourierProfile, t_cut: f64, tau: f64) -> f64 {
    if t_cut <= 0.0 {
        return f64::INFINITY;
    }
    let slope = tau * t_cut.powf(tau - 1.0);
    ((1.0 - tau) * t_cut.powf(tau)).exp() * f.tail_bound(t_cut, slope)
}

pub fn domar_norm(f: &FourierProfile, tau: f64) -> Result<f64> {
    Ok(domar_norm_detailed(f, tau)?.value)
}

pub fn domar_norm_detailed(f: &FourierProfile, tau: f64) -> Result<DomarNorm> {
    f.validate()?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!("τ = {tau} outside (0, 1)")));
    }
    let t_max = match f.support() {
        Some(s) => s,
        None => {
            let mut t = 1.0;
            while !(domar_tail(f, t, tau) <= 1e-11) {
                t *= 1.5;
                if t > 1e7 {
                    return Err(Error::InvalidParameter("profile is not integrable against e^{|t|^τ}".into()));
                }
            }
            t
        }
    };
    let tail = domar_tail(f, t_max, tau);
    if !tail.is_finite() {
        return Err(Error::InvalidParameter("profile tail bound is infinite for this weight".into()));
    }
    let mut breaks: Vec<f64> = f.breakpoints().into_iter().filter(|b| b.abs() < t_max).collect();
    breaks.insert(0, -t_max);
    breaks.push(t_max);
    let h = |t: f64| c(f.fhat(t).norm() * t.abs().powf(tau).exp());
    let (v, e) = adaptive_pieces(&h, &breaks, 1e-10);
    Ok(DomarNorm {
        value: v.re,
        error_bound: e + tail,
        t_max,
    })
}

// ---------------------------------------------------------------------------
// Functional calculus

/// Discretized `λ ↦ (1/2π) ∫_{-T}^{T} f̂(t) e^{itλ} dt`.
#[derive(Clone, Debug)]
pub struct ScalarRule {
    nodes: Vec<(f64, Complex64)>,
}

impl ScalarRule {
    fn new(f: &FourierProfile, breaks: &[f64], base: &[usize], level: u32) -> Self {
        let mut nodes = Vec::new();
        for (w, &p) in breaks.windows(2).zip(base) {
            for (t, wt) in composite_nodes(w[0], w[1], p << level) {
                let v = f.fhat(t);
                if v != c(0.0) {
                    nodes.push((t, v * wt / (2.0 * PI)));
                }
            }
        }
        Self { nodes }
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        self.nodes
            .iter()
            .map(|(t, w)| w * Complex64::from_polar(1.0, t * lambda))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct FuncCalc {
    pub value: AlgebraElement,
    pub t_max: f64,
    pub nodes: usize,
    /// `(1/2π) ∫_{|t|>T} |f̂| e^{|t|‖a‖_A}`.
    pub tail_bound: f64,
    /// A-norm change under one more panel doubling.
    pub refinement: f64,
    pub error_bound: f64,
    /// Set when `f(0) = 0` and the constant part was removed.
    pub non_unital: bool,
    pub f_zero: Complex64,
}

const MAX_LEVEL: u32 = 14;

/// `f(x)` for self-adjoint `x` in a matrix, lattice-section or trigonometric carrier.
pub fn func_calc(f: &FourierProfile, x: &AlgebraElement, inst: &AlgebraInstance, tol: f64) -> Result<FuncCalc> {
    f.validate()?;
    inst.check_element(x)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let deviation = x.self_adjoint_defect();
    if deviation > 1e-12 * (1.0 + x.max_abs()) {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let r = inst.a_norm(x)?;
    let rho = inst.b_norm(x)?;

    let t_max = match f.support() {
        Some(s) => s,
        None => {
            let ok = |t: f64| f.tail_bound(t, r) / (2.0 * PI) <= tol / 2.0;
            let mut hi = 1.0;
            while !ok(hi) {
                hi *= 2.0;
                if hi > 1e6 {
                    return Err(Error::ToleranceUnachievable { tol });
                }
            }
            let mut lo = hi / 2.0;
            for _ in 0..40 {
                let mid = (lo + hi) / 2.0;
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    let tail = f.tail_bound(t_max, r) / (2.0 * PI);
    if !(tail <= tol / 2.0) {
        return Err(Error::ToleranceUnachievable { tol });
    }
    let mut breaks: Vec<f64> = f.breakpoints().into_iter().filter(|b| b.abs() < t_max).collect();
    breaks.insert(0, -t_max);
    breaks.push(t_max);
    let base: Vec<usize> = breaks
        .windows(2)
        .map(|w| (((w[1] - w[0]) * (rho + 1.0)) / 8.0).ceil().max(1.0) as usize)
        .collect();

    let non_unital = f.value(0.0).norm() <= 1e-10;
    let apply = |rule: &ScalarRule| -> Result<AlgebraElement> {
        let shift = if non_unital { rule.eval(0.0) } else { c(0.0) };
        apply_scalar(x, inst, tol / 8.0, |l| rule.eval(l) - shift)
    };
    let mut prev = apply(&ScalarRule::new(f, &breaks, &base, 0))?;
    for level in 1..=MAX_LEVEL {
        let rule = ScalarRule::new(f, &breaks, &base, level);
        let cur = apply(&rule)?;
        let refinement = inst.a_norm(&cur.sub(&prev)?)?;
        if refinement <= tol / 4.0 {
            return Ok(FuncCalc {
                value: cur,
                t_max,
                nodes: rule.len(),
                tail_bound: tail,
                refinement,
                error_bound: tail + refinement,
                non_unital,
                f_zero: rule.eval(0.0),
            });
        }
        prev = cur;
    }
    Err(Error::ToleranceUnachievable { tol })
}

/// Applies a scalar function to a self-adjoint element through its spectral picture.
fn apply_scalar(
    x: &AlgebraElement,
    inst: &AlgebraInstance,
    grid_tol: f64,
    g: impl Fn(f64) -> Complex64,
) -> Result<AlgebraElement> {
    let weight = match inst.kind() {
        AlgebraKind::WeightedL1 { weight, .. } | AlgebraKind::WeightedL2 { weight, .. } => *weight,
        AlgebraKind::C1Torus => Weight::Polynomial { s: 1.0 },
        _ => Weight::Constant,
    };
    match x {
        AlgebraElement::Matrix(a) => {
            let eig = hermitian_eig(&a.hermitian_part())?;
            let vals: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| g(l)).collect();
            Ok(AlgebraElement::Matrix(eig.apply_values(&vals)))
        }
        AlgebraElement::Section(s) => {
            let view = torus_view(s)?;
            let out = if view.period.is_some() {
                crate::group::torus::apply_on_grid(&view, 0, |z| g(z.re))
            } else {
                converged_grid(&view, &weight, grid_tol, |z| g(z.re))?
            };
            Ok(AlgebraElement::Section(section_from_lattice(s.group().clone(), &out)?))
        }
        AlgebraElement::Trig(p) => {
            let view = TorusView {
                dim: 1,
                period: None,
                terms: p.coefficients().iter().map(|(n, v)| (vec![*n], *v)).collect(),
            };
            let out = converged_grid(&view, &weight, grid_tol, |z| g(z.re))?;
            Ok(AlgebraElement::Trig(TrigPolynomial::new(out.into_iter().map(|(k, v)| (k[0], v)))?))
        }
    }
}

fn cstar() -> AlgebraInstance {
    AlgebraInstance::new("cstar", AlgebraKind::CStar).expect("operator norm instance")
}

/// Hausdorff distance between two finite subsets of the plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |p: &[Complex64], q: &[Complex64]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

/// Distance between the spectrum of `f(x)` and `f` applied to the spectrum of `x`.
pub fn spectral_mapping_check(f: &FourierProfile, x: &ComplexMatrix, tol: f64) -> Result<f64> {
    let fx = func_calc(f, &AlgebraElement::Matrix(x.clone()), &cstar(), tol)?;
    let out = spectrum_b(fx.value.as_matrix().expect("matrix carrier"))?;
    let eig = hermitian_eig(x)?;
    let shift = if fx.non_unital { f.value(0.0) } else { c(0.0) };
    let mapped: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| f.value(l) - shift).collect();
    Ok(hausdorff(&out, &mapped))
}

/// `‖(fg)(x) − f(x) g(x)‖_op`.
pub fn homomorphism_check(f: &FourierProfile, g: &FourierProfile, x: &ComplexMatrix, tol: f64) -> Result<f64> {
    let inst = cstar();
    let xe = AlgebraElement::Matrix(x.clone());
    let fg = FourierProfile::product(f, g)?;
    let a = func_calc(&fg, &xe, &inst, tol)?;
    let b = func_calc(f, &xe, &inst, tol)?;
    let d = func_calc(g, &xe, &inst, tol)?;
    // Removing f(0), g(0) and (fg)(0) separately breaks multiplicativity, so restore them.
    let restore = |r: &FuncCalc| -> Result<ComplexMatrix> {
        let m = r.value.as_matrix().expect("matrix carrier").clone();
        if r.non_unital {
            m.try_add(&ComplexMatrix::identity(m.dim()).scale(r.f_zero))
        } else {
            Ok(m)
        }
    };
    let (a, b, d) = (restore(&a)?, restore(&b)?, restore(&d)?);
    Ok(operator_norm(&a.try_sub(&b.matmul(&d)?)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxIdentityRow {
    pub n: usize,
    /// `‖f(b_N) a − a‖_A`.
    pub residual: f64,
    /// `‖f(b_N) − b_N‖_A`.
    pub projection_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxIdentityTable {
    pub instance: String,
    pub support_radius: usize,
    pub tol: f64,
    pub rows: Vec<ApproxIdentityRow>,
    pub nonincreasing_past_support: bool,
    pub pass: bool,
}

/// Smallest `r` with `a` supported in `{0..r-1}²`.
pub fn window_support(a: &ComplexMatrix) -> usize {
    let n = a.dim();
    let mut r = 0;
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] != c(0.0) {
                r = r.max(i.max(j) + 1);
            }
        }
    }
    r
}

/// Runs `f(b_N) a → a` for the diagonal projections `b_N` onto the first `N` coordinates.
pub fn approx_identity_experiment(
    inst: &AlgebraInstance,
    f: &FourierProfile,
    a: &ComplexMatrix,
    n_grid: &[usize],
    tol: f64,
) -> Result<ApproxIdentityTable> {
    f.validate()?;
    let (f0, f1) = (f.value(0.0), f.value(1.0));
    if f0.norm() > 1e-10 || (f1 - 1.0).norm() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "approximate identities need f(0) = 0 and f(1) = 1 (got {f0}, {f1})"
        )));
    }
    let ae = AlgebraElement::Matrix(a.clone());
    inst.check_element(&ae)?;
    let dim = a.dim();
    let support_radius = window_support(a);
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let diag: Vec<f64> = (0..dim).map(|i| if i < n { 1.0 } else { 0.0 }).collect();
        let b = AlgebraElement::Matrix(ComplexMatrix::from_real_diag(&diag));
        let fb = func_calc(f, &b, inst, tol)?.value;
        let residual = inst.a_norm(&fb.mul(&ae)?.sub(&ae)?)?;
        let projection_gap = inst.a_norm(&fb.sub(&b)?)?;
        rows.push(ApproxIdentityRow {
            n,
            residual,
            projection_gap,
        });
    }
    let past: Vec<&ApproxIdentityRow> = rows.iter().filter(|r| r.n >= support_radius).collect();
    let nonincreasing_past_support = past.windows(2).all(|w| w[1].residual <= w[0].residual + tol);
    let pass = past.iter().all(|r| r.residual <= tol) && rows.iter().all(|r| r.projection_gap <= tol);
    Ok(ApproxIdentityTable {
        instance: inst.name().to_string(),
        support_radius,
        tol,
        rows,
        nonincreasing_past_support,
        pass,
    })
}

impl ApproxIdentityTable {
    pub fn table(&self) -> crate::report::Table {
        let mut t = crate::report::Table::new(["n", "residual", "projection_gap"]);
        t.meta("instance", &self.instance);
        t.meta("support_radius", self.support_radius);
        for r in &self.rows {
            t.row([r.n.to_string(), r.residual.to_string(), r.projection_gap.to_string()]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_domar_norm_is_four() {
        let v = domar_norm_detailed(&FourierProfile::box_(1.0), 0.5).unwrap();
        assert!((v.value - 4.0).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn zero_profile_has_zero_norm() {
        let f = FourierProfile::Sum {
            terms: vec![ShiftedTerm {
                weight: 0.0,
                shift: 0.0,
                profile: FourierProfile::gaussian(1.0),
            }],
        };
        assert_eq!(domar_norm(&f, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn unit_bump_normalization() {
        let f = FourierProfile::unit_bump(0.3);
        assert!(f.value(0.0).norm() < 1e-15);
        assert!((f.value(1.0) - 1.0).norm() < 1e-14);
        assert!(f.is_real());
    }

    #[test]
    fn tabulated_requires_tail() {
        let p = FourierProfile::Tabulated {
            grid: vec![-1.0, 0.0, 1.0],
            values: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]],
            tail: None,
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn gaussian_product_closed_form() {
        let f = FourierProfile::gaussian(0.7);
        let g = FourierProfile::Sum {
            terms: vec![ShiftedTerm {
                weight: 2.0,
                shift: 0.4,
                profile: FourierProfile::gaussian(1.3),
            }],
        };
        let h = FourierProfile::product(&f, &g).unwrap();
        for x in [-2.0, -0.3, 0.0, 0.9, 3.1] {
            let want = f.value(x) * g.value(x);
            assert!((h.value(x) - want).norm() < 1e-15 * (1.0 + want.norm()));
        }
    }
}
