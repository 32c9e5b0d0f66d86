//! One-parameter orbits `u(ta) = e^{ita} - 1` and the growth bookkeeping around them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraInstance, AlgebraKind, DiffTriple, TrigPolynomial};
use crate::error::{Error, Result};
use crate::group::torus::{apply_on_grid, section_from_lattice, torus_view, LatticeTerms, TorusView};
use crate::group::{GroupFamily, Weight, WeightedSection};
use crate::matrix::{mat_exp_hermitian, ComplexMatrix};
use crate::parallel::par_map;

/// Absolute weighted tail left behind by truncated Bessel series.
pub const BESSEL_TAIL: f64 = 1e-10;
/// Default tolerance added to `tau_bound` before a trace fails.
pub const DEFAULT_SLACK: f64 = 0.1;
/// Below this R² the fitted exponent is not trusted.
pub const MIN_FIT_QUALITY: f64 = 0.98;

const GRID_START: usize = 1 << 12;
const GRID_POINT_CAP: usize = 1 << 22;
/// Grid coefficients below this fraction of the largest one (or of 1) are FFT noise.
const GRID_FLOOR: f64 = 1e-14;
const TAYLOR_TAIL: f64 = 1e-17;
/// Coefficients of `u(ta)` below this modulus are dropped on the Taylor path.
const TAYLOR_CUT: f64 = 1e-15;
/// Support size at which the Taylor path gives up.
const TAYLOR_SUPPORT_CAP: usize = 400_000;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Bessel functions of integer order

/// `J_0(x), ..., J_{n_max}(x)` by Miller's backward recurrence, normalized
/// with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = (n_max as f64).max(ax);
    let mut m = (top + (160.0 * top).sqrt()) as usize + 16;
    m += m % 2;
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        let jm = 2.0 * k as f64 / ax * j - jp;
        jp = j;
        j = jm;
        if k - 1 <= n_max {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += j;
    for (n, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && n % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// `J_n(x)` for any integer order.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let v = bessel_j_all(n.unsigned_abs() as usize, x)[n.unsigned_abs() as usize];
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_n(x) = (1/2π) ∫ cos(nτ − x sin τ) dτ` by the periodic trapezoid rule.
///
/// Accurate to rounding in absolute terms; used as an independent check.
pub fn bessel_j_integral(n: i64, x: f64) -> f64 {
    let m = 2 * (n.unsigned_abs() as usize + x.abs() as usize + 64);
    let h = 2.0 * PI / m as f64;
    let s: f64 = (0..m)
        .map(|j| {
            let tau = j as f64 * h;
            (n as f64 * tau - x * tau.sin()).cos()
        })
        .sum();
    s / m as f64
}

// ---------------------------------------------------------------------------
// u(ta)

/// Coefficient weight controlling truncation of `u(ta)` in this instance.
fn tail_weight(inst: &AlgebraInstance) -> Weight {
    match inst.kind() {
        AlgebraKind::WeightedL1 { weight, .. } | AlgebraKind::WeightedL2 { weight, .. } => *weight,
        // sup|f| + sup|f'| ≤ Σ (1 + |n|) |f̂(n)|
        AlgebraKind::C1Torus => Weight::Polynomial { s: 1.0 },
        _ => Weight::Constant,
    }
}

/// `u(tx) = e^{itx} − 1` computed in the carrier of `x`.
pub fn u_of(x: &AlgebraElement, inst: &AlgebraInstance, t: f64) -> Result<AlgebraElement> {
    inst.check_element(x)?;
    if !t.is_finite() {
        return Err(Error::NonFinite(format!("orbit parameter t = {t}")));
    }
    let deviation = x.self_adjoint_defect();
    if deviation > 1e-12 * (1.0 + x.max_abs()) {
        return Err(Error::NotSelfAdjoint { deviation });
    }
    let weight = tail_weight(inst);
    match x {
        AlgebraElement::Matrix(a) => {
            let a = a.hermitian_part();
            let e = mat_exp_hermitian(&a, t)?;
            Ok(AlgebraElement::Matrix(e.try_sub(&ComplexMatrix::identity(a.dim()))?))
        }
        AlgebraElement::Trig(f) => {
            let terms: Vec<(i64, Complex64)> = f.coefficients().iter().map(|(n, v)| (*n, *v)).collect();
            let out = u_integer(&terms, t, &weight)?;
            Ok(AlgebraElement::Trig(TrigPolynomial::new(out)?))
        }
        AlgebraElement::Section(f) => Ok(AlgebraElement::Section(u_section(f, t, &weight)?)),
    }
}

fn u_section(f: &WeightedSection, t: f64, weight: &Weight) -> Result<WeightedSection> {
    let group = f.group().clone();
    match group.family() {
        GroupFamily::Lattice { dim: 1 } | GroupFamily::Free { rank: 1 } => {
            let terms = f.integer_terms().expect("rank-one group");
            let out = u_integer(&terms, t, weight)?;
            let lattice: LatticeTerms = out.into_iter().map(|(n, v)| (vec![n], v)).collect();
            section_from_lattice(group, &lattice)
        }
        GroupFamily::Cyclic { .. } => {
            let view = torus_view(f)?;
            let out = apply_on_grid(&view, 0, |z| (Complex64::i() * t * z).exp() - 1.0);
            section_from_lattice(group, &out)
        }
        GroupFamily::Lattice { .. } => {
            let view = torus_view(f)?;
            let out = u_grid(&view, t, weight)?;
            section_from_lattice(group, &out)
        }
        _ => u_taylor(f, t, weight),
    }
}

/// `u` on a section of `Z`: Bessel series when the symbol is `a₀ + 2|b| cos(mθ + φ)`,
/// torus quadrature otherwise.
fn u_integer(terms: &[(i64, Complex64)], t: f64, weight: &Weight) -> Result<Vec<(i64, Complex64)>> {
    let nonzero: Vec<(i64, Complex64)> = terms.iter().copied().filter(|(_, v)| *v != c(0.0)).collect();
    if let Some(out) = u_cosine(&nonzero, t, weight)? {
        return Ok(out);
    }
    let view = TorusView {
        dim: 1,
        period: None,
        terms: nonzero.into_iter().map(|(n, v)| (vec![n], v)).collect(),
    };
    Ok(u_grid(&view, t, weight)?.into_iter().map(|(k, v)| (k[0], v)).collect())
}

fn u_cosine(terms: &[(i64, Complex64)], t: f64, weight: &Weight) -> Result<Option<Vec<(i64, Complex64)>>> {
    let mut a0 = 0.0;
    let mut pair: Option<(i64, Complex64)> = None;
    for &(n, v) in terms {
        if n == 0 {
            a0 = v.re;
        } else if n > 0 {
            if pair.is_some() {
                return Ok(None);
            }
            pair = Some((n, v));
        }
    }
    let phase0 = Complex64::from_polar(1.0, t * a0);
    let Some((m, b)) = pair else {
        // Multiple of the unit.
        return Ok(Some(vec![(0, phase0 - 1.0)]));
    };
    if terms.len() > if a0 != 0.0 { 3 } else { 2 } {
        return Ok(None);
    }
    let x = 2.0 * t * b.norm();
    let phi = b.arg();
    let n_cut = bessel_cutoff(x, m as usize, weight)?;
    let j = bessel_j_all(n_cut, x);
    let mut out = Vec::with_capacity(2 * n_cut + 1);
    for (n, jn) in j.iter().enumerate() {
        let n_i = n as i64;
        // i^n J_n(x) e^{±inφ}; J_{-n} = (-1)^n J_n absorbs the i^{-n}.
        let i_n = Complex64::i().powu(n as u32 % 4);
        let plus = phase0 * i_n * jn * Complex64::from_polar(1.0, n as f64 * phi);
        if n == 0 {
            out.push((0, plus - 1.0));
        } else {
            let minus = phase0 * i_n * jn * Complex64::from_polar(1.0, -(n as f64) * phi);
            out.push((n_i * m, plus));
            out.push((-n_i * m, minus));
        }
    }
    Ok(Some(out))
}

/// Smallest `N` whose weighted tail `2 Σ_{n>N} ν(nm) (|x|/2)^n / n!` is below [`BESSEL_TAIL`].
fn bessel_cutoff(x: f64, m: usize, weight: &Weight) -> Result<usize> {
    let half = x.abs() / 2.0;
    if half == 0.0 {
        return Ok(0);
    }
    // Successive weight ratios are at most ν(m) by submultiplicativity.
    let step = weight.at_length(m);
    let ln_half = half.ln();
    let mut ln_fact = 0.0;
    for n in 0..10_000_000usize {
        let next = n + 1;
        ln_fact += (next as f64).ln();
        let ln_term = weight.at_length(next * m).ln() + next as f64 * ln_half - ln_fact;
        let ratio = step * half / (next + 1) as f64;
        if ratio <= 0.5 && (4.0f64).ln() + ln_term < BESSEL_TAIL.ln() {
            return Ok(n);
        }
    }
    Err(Error::ToleranceUnachievable { tol: BESSEL_TAIL })
}

/// `u` on a lattice section by torus quadrature.
fn u_grid(view: &TorusView, t: f64, weight: &Weight) -> Result<LatticeTerms> {
    converged_grid(view, weight, 1e-9, |z| (Complex64::i() * t * z).exp() - 1.0)
}

/// Coefficients of `g(σ)` for the symbol `σ` of `view`, doubling the grid until
/// the spectrum has decayed below the noise floor near Nyquist and two
/// successive grids agree within `tol·(1 + ‖·‖)` in the weighted ℓ¹ norm.
pub(crate) fn converged_grid(
    view: &TorusView,
    weight: &Weight,
    tol: f64,
    g: impl Fn(Complex64) -> Complex64,
) -> Result<LatticeTerms> {
    let dim = view.dim;
    let run = |n: usize| -> LatticeTerms {
        let raw = apply_on_grid(view, n, &g);
        let top = raw.iter().map(|(_, v)| v.norm()).fold(1.0, f64::max);
        raw.into_iter().filter(|(_, v)| v.norm() > GRID_FLOOR * top).collect()
    };
    let wnorm = |terms: &LatticeTerms| -> f64 {
        terms
            .iter()
            .map(|(k, v)| weight.at_length(k.iter().map(|a| a.unsigned_abs() as usize).sum()) * v.norm())
            .sum()
    };
    let mut n = if dim == 1 { GRID_START } else { 1 << 6 };
    let mut prev: Option<LatticeTerms> = None;
    while n.checked_pow(dim as u32).is_some_and(|p| p <= GRID_POINT_CAP) {
        let cur = run(n);
        let edge = cur.iter().any(|(k, _)| k.iter().any(|a| a.unsigned_abs() as usize > n / 4));
        if !edge {
            if let Some(p) = &prev {
                let diff = difference(p, &cur);
                if wnorm(&diff) <= tol * (1.0 + wnorm(&cur)) {
                    return Ok(cur);
                }
            }
            prev = Some(cur);
        } else {
            prev = None;
        }
        n *= 2;
    }
    Err(Error::ToleranceUnachievable { tol })
}

fn difference(a: &LatticeTerms, b: &LatticeTerms) -> LatticeTerms {
    let mut m: BTreeMap<Vec<i64>, Complex64> = a.iter().cloned().collect();
    for (k, v) in b {
        *m.entry(k.clone()).or_insert(c(0.0)) -= v;
    }
    m.into_iter().collect()
}

/// `u` on a non-abelian section: Taylor series at `t/2^s`, then `s` doublings
/// through `u(2r) = u(r)² + 2u(r)`.
fn u_taylor(f: &WeightedSection, t: f64, weight: &Weight) -> Result<WeightedSection> {
    let group: Arc<_> = f.group().clone();
    let norm = f.weighted_lp_norm(weight, 1.0)? * t.abs();
    let mut s = 0u32;
    // Squaring is costly on non-abelian supports; summing to norm 2 loses about e² ulps.
    while norm / 2f64.powi(s as i32) > 2.0 {
        s += 1;
        if s > 40 {
            return Err(Error::ToleranceUnachievable { tol: TAYLOR_TAIL });
        }
    }
    let y = f.scale(Complex64::i() * (t / 2f64.powi(s as i32)));
    let ny = norm / 2f64.powi(s as i32);
    let mut sum = WeightedSection::zero(group.clone());
    let mut term = WeightedSection::delta(group.clone(), group.identity());
    let mut bound = 1.0;
    for j in 1..60 {
        term = term.convolve(&y)?.scale(c(1.0 / j as f64)).pruned_below(TAYLOR_CUT);
        taylor_cap(&term)?;
        sum = sum.add(&term)?;
        bound *= ny / (j + 1) as f64;
        if bound < TAYLOR_TAIL {
            break;
        }
    }
    for _ in 0..s {
        if sum.support_len().pow(2) > TAYLOR_SUPPORT_CAP * 250 {
            return Err(Error::ToleranceUnachievable { tol: TAYLOR_CUT });
        }
        sum = sum.convolve(&sum)?.add(&sum.scale(c(2.0)))?.pruned_below(TAYLOR_CUT);
        taylor_cap(&sum)?;
    }
    Ok(sum)
}

fn taylor_cap(f: &WeightedSection) -> Result<()> {
    if f.support_len() > TAYLOR_SUPPORT_CAP {
        return Err(Error::ToleranceUnachievable { tol: TAYLOR_CUT });
    }
    Ok(())
}

/// `‖u((s+t)a) − u(sa)u(ta) − u(sa) − u(ta)‖_A`.
pub fn cocycle_residual(x: &AlgebraElement, inst: &AlgebraInstance, s: f64, t: f64) -> Result<f64> {
    let us = u_of(x, inst, s)?;
    let ut = u_of(x, inst, t)?;
    let ust = u_of(x, inst, s + t)?;
    let rhs = us.mul(&ut)?.add(&us)?.add(&ut)?;
    inst.a_norm(&ust.sub(&rhs)?)
}

// ---------------------------------------------------------------------------
// Growth traces

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TraceVerdict {
    Pass,
    Fail,
    Unreliable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub instance: String,
    pub triple: String,
    pub t_grid: Vec<f64>,
    pub norms: Vec<f64>,
    pub norm_oracle: Option<Vec<f64>>,
    pub tau_bound: f64,
    pub tau_fit: f64,
    pub intercept: f64,
    pub fit_quality: f64,
    pub slack: f64,
    pub bounded: bool,
    pub verdict: TraceVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthOptions {
    pub slack: f64,
    /// Smallest grid point; defaults to `t_max / 100`.
    pub t_min: Option<f64>,
    pub jobs: usize,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self {
            slack: DEFAULT_SLACK,
            t_min: None,
            jobs: 1,
        }
    }
}

pub fn log_grid(t_min: f64, t_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![t_max];
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    (0..points)
        .map(|j| (a + (b - a) * j as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Least squares `y = slope·x + intercept`; returns `(slope, intercept, R²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return (0.0, my, 0.0);
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

pub fn growth_trace(
    x: &AlgebraElement,
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    t_max: f64,
    points: usize,
) -> Result<GrowthTrace> {
    growth_trace_with(x, inst, triple, t_max, points, GrowthOptions::default())
}

pub fn growth_trace_with(
    x: &AlgebraElement,
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    t_max: f64,
    points: usize,
    opts: GrowthOptions,
) -> Result<GrowthTrace> {
    if !(t_max > 0.0 && t_max.is_finite()) || points < 4 {
        return Err(Error::InvalidParameter(format!(
            "growth trace needs t_max > 0 and at least 4 points (got {t_max}, {points})"
        )));
    }
    let t_min = opts.t_min.unwrap_or(t_max / 100.0);
    if !(t_min > 0.0 && t_min < t_max) {
        return Err(Error::InvalidParameter(format!("t_min = {t_min} outside (0, t_max)")));
    }
    if !(opts.slack >= 0.0) {
        return Err(Error::InvalidParameter(format!("slack = {} < 0", opts.slack)));
    }
    let t_grid = log_grid(t_min, t_max, points);
    let norms = par_map(points, opts.jobs, |j| u_of(x, inst, t_grid[j]).and_then(|u| inst.a_norm(&u)))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let half = points / 2;
    let xs: Vec<f64> = t_grid[half..].iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = norms[half..].iter().map(|v| (v + std::f64::consts::E).ln().ln()).collect();
    let (tau_fit, intercept, fit_quality) = linear_fit(&xs, &ys);
    let lower = norms[..half].iter().copied().fold(0.0, f64::max);
    let upper = norms[half..].iter().copied().fold(0.0, f64::max);
    let bounded = upper <= 1.1 * lower || upper == 0.0;
    let tau_bound = triple.tau_bound();
    let verdict = if bounded {
        TraceVerdict::Pass
    } else if fit_quality < MIN_FIT_QUALITY {
        TraceVerdict::Unreliable
    } else if tau_fit <= tau_bound + opts.slack {
        TraceVerdict::Pass
    } else {
        TraceVerdict::Fail
    };
    Ok(GrowthTrace {
        instance: inst.name().to_string(),
        triple: triple.to_string(),
        t_grid,
        norms,
        norm_oracle: None,
        tau_bound,
        tau_fit,
        intercept,
        fit_quality,
        slack: opts.slack,
        bounded,
        verdict,
    })
}

impl GrowthTrace {
    pub fn attach_oracle(&mut self, oracle: impl Fn(f64) -> f64) {
        self.norm_oracle = Some(self.t_grid.iter().map(|&t| oracle(t)).collect());
    }

    /// Largest relative disagreement with the attached oracle.
    pub fn oracle_gap(&self) -> Option<f64> {
        let o = self.norm_oracle.as_ref()?;
        Some(
            self.norms
                .iter()
                .zip(o)
                .map(|(a, b)| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max),
        )
    }

    /// Smallest `B` with `‖u(ta)‖ ≤ B e^{t^τ}` on the grid.
    pub fn prefactor(&self, tau: f64) -> f64 {
        self.t_grid
            .iter()
            .zip(&self.norms)
            .map(|(t, n)| n / t.powf(tau).exp())
            .fold(0.0, f64::max)
    }

    pub fn table(&self) -> crate::report::Table {
        let mut table = crate::report::Table::new(["t", "norm_A", "norm_oracle"]);
        table.meta("instance", &self.instance);
        table.meta("triple", &self.triple);
        table.meta("tau_bound", self.tau_bound);
        table.meta("tau_fit", self.tau_fit);
        for (j, (t, n)) in self.t_grid.iter().zip(&self.norms).enumerate() {
            let o = self.norm_oracle.as_ref().map(|o| o[j].to_string()).unwrap_or_default();
            table.row([t.to_string(), n.to_string(), o]);
        }
        table
    }
}

/// `Σ_n ν(n) |J_n(2t) − [n = 0]|`, the weighted norm of `u(t(δ₁ + δ₋₁))` on `Z`,
/// with Bessel values from the trapezoid integral.
pub fn cosine_orbit_norm(weight: &Weight, t: f64) -> f64 {
    let x = 2.0 * t;
    let n_max = x.abs() as i64 + 80;
    let mut total = (bessel_j_integral(0, x) - 1.0).abs();
    for n in 1..=n_max {
        total += 2.0 * weight.at_length(n as usize) * bessel_j_integral(n, x).abs();
    }
    total
}

/// `‖u(n x)‖_A` for each `n` in `ns`.
pub fn orbit_norms(x: &AlgebraElement, inst: &AlgebraInstance, ns: &[usize], jobs: usize) -> Result<Vec<f64>> {
    par_map(ns.len(), jobs, |j| u_of(x, inst, ns[j] as f64).and_then(|u| inst.a_norm(&u)))
        .into_iter()
        .collect()
}

// ---------------------------------------------------------------------------
// Sequence lemma

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsympEntry {
    pub n: usize,
    pub a_n: f64,
    /// Exponent of the explicit bound, `A(k−1)(2 + log_k n) k n^{log_k γ}`.
    pub log_bound: f64,
    pub log_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsympReport {
    pub k: u32,
    pub gamma: f64,
    pub n_max: usize,
    pub big_a: f64,
    pub pairs_checked: usize,
    pub entries: Vec<AsympEntry>,
    pub worst_n: usize,
    pub max_log_ratio: f64,
    pub holds: bool,
}

/// Rounding allowance when comparing products of computed norms.
const HYPOTHESIS_REL: f64 = 1e-12;

/// Scans `a_{n+m} ≤ a_n a_m` and `a_{kn} ≤ a_n^γ` for indices up to `n_max`,
/// then checks the explicit bound with `A = ln a₁`.
pub fn asymp_check(a: impl Fn(usize) -> Result<f64>, k: u32, gamma: f64, n_max: usize) -> Result<AsympReport> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} < 2")));
    }
    if !(gamma > 1.0 && gamma < k as f64) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} outside (1, {k})")));
    }
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be positive".into()));
    }
    let mut seq = vec![0.0; n_max + 1];
    for (n, slot) in seq.iter_mut().enumerate().skip(1) {
        let v = a(n)?;
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("a_{n} = {v} is not a nonnegative number")));
        }
        *slot = v;
    }
    let mut pairs = 0;
    for n in 1..=n_max {
        for m in n..=n_max - n {
            pairs += 1;
            let (lhs, rhs) = (seq[n + m], seq[n] * seq[m]);
            if lhs > rhs * (1.0 + HYPOTHESIS_REL) {
                return Err(Error::HypothesisViolation {
                    which: "a(n+m) <= a(n) a(m)",
                    n,
                    m,
                    lhs,
                    rhs,
                });
            }
        }
    }
    let k_us = k as usize;
    for n in 1..=n_max / k_us {
        pairs += 1;
        let (lhs, rhs) = (seq[k_us * n], seq[n].powf(gamma));
        if lhs > rhs * (1.0 + HYPOTHESIS_REL) {
            return Err(Error::HypothesisViolation {
                which: "a(kn) <= a(n)^gamma",
                n,
                m: k_us * n,
                lhs,
                rhs,
            });
        }
    }
    let big_a = seq[1].ln();
    let kf = k as f64;
    let exponent = gamma.ln() / kf.ln();
    let entries: Vec<AsympEntry> = (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let log_bound = big_a * (kf - 1.0) * (2.0 + nf.ln() / kf.ln()) * kf * nf.powf(exponent);
            let log_a = seq[n].ln();
            AsympEntry {
                n,
                a_n: seq[n],
                log_bound,
                log_ratio: log_a - log_bound,
            }
        })
        .collect();
    let (worst_n, max_log_ratio) = entries
        .iter()
        .map(|e| (e.n, e.log_ratio))
        .fold((1, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
    let holds = entries.iter().all(|e| e.log_ratio <= 1e-12 * e.log_bound.abs().max(1.0));
    Ok(AsympReport {
        k,
        gamma,
        n_max,
        big_a,
        pairs_checked: pairs,
        entries,
        worst_n,
        max_log_ratio,
        holds,
    })
}

/// Both sides of `Σ_{β≤k−2} C(k−1,β) + Σ_{α≤k−2} Σ_{β≤α} C(α,β) = 2^k − 2`, exactly.
pub fn comb_identity(k: u32) -> Result<(u128, u128)> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} < 2")));
    }
    if k > 60 {
        return Err(Error::Overflow(format!("k = {k} exceeds the exact range k ≤ 60")));
    }
    let overflow = || Error::Overflow(format!("binomial sums at k = {k}"));
    let k = k as usize;
    // Pascal rows 0..=k-1.
    let mut rows: Vec<Vec<u128>> = vec![vec![1]];
    for r in 1..k {
        let prev = &rows[r - 1];
        let mut row = vec![1u128; r + 1];
        for b in 1..r {
            row[b] = prev[b - 1].checked_add(prev[b]).ok_or_else(overflow)?;
        }
        rows.push(row);
    }
    let mut lhs: u128 = 0;
    for b in 0..=k - 2 {
        lhs = lhs.checked_add(rows[k - 1][b]).ok_or_else(overflow)?;
    }
    for row in rows.iter().take(k - 1) {
        for v in row {
            lhs = lhs.checked_add(*v).ok_or_else(overflow)?;
        }
    }
    let rhs = (1u128 << k) - 2;
    Ok((lhs, rhs))
}

/// Smallest `D ≥ 1` with `D^{γ−1} ≥ max{2^k, 2^q c + 2^k − 1}`.
pub fn d_constant(k: u32, q: f64, gamma: f64, c: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidParameter(format!("γ = {gamma} must exceed 1")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("constant c = {c} must be positive")));
    }
    let two_k = 2f64.powi(k as i32);
    let base = two_k.max(2f64.powf(q) * c + two_k - 1.0);
    Ok(base.powf(1.0 / (gamma - 1.0)).max(1.0))
}

/// Binomial coefficients as floats, exact for the small `k` used here.
fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

/// `‖u(kna) − [z^k + Σ C(k−1,β) z^{β+1} + ΣΣ C(α,β) z^{β+1}]‖_A` with `z = u(na)`.
pub fn polynomial_expansion_check(x: &AlgebraElement, inst: &AlgebraInstance, k: u32, n: u32) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} < 2")));
    }
    let k = k as usize;
    let z = u_of(x, inst, n as f64)?;
    let lhs = u_of(x, inst, (k * n as usize) as f64)?;
    let mut powers = vec![z.clone()];
    for _ in 1..k {
        let next = powers.last().expect("nonempty").mul(&z)?;
        powers.push(next);
    }
    // z^{β+1} collects C(k−1,β) for β ≤ k−2 and Σ_{α=β}^{k−2} C(α,β).
    let mut rhs = powers[k - 1].clone();
    for beta in 0..=k - 2 {
        let coeff = binomial(k - 1, beta) + (beta..=k - 2).map(|a| binomial(a, beta)).sum::<f64>();
        rhs = rhs.add(&powers[beta].scale_real(coeff))?;
    }
    inst.a_norm(&lhs.sub(&rhs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_known_values() {
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j(0, 2.0) - 0.223_890_779_141_235_67).abs() < 1e-15);
        assert!((bessel_j(-3, 2.5) + bessel_j(3, 2.5)).abs() < 1e-16);
        assert!((bessel_j(2, -1.3) - bessel_j(2, 1.3)).abs() < 1e-16);
    }

    #[test]
    fn miller_against_integral() {
        for &x in &[0.3, 2.0, 7.5, 31.0, 60.0, 250.0] {
            let j = bessel_j_all(120, x);
            for (n, v) in j.iter().enumerate() {
                let w = bessel_j_integral(n as i64, x);
                assert!((v - w).abs() < 2e-14, "J_{n}({x}): {v} vs {w}");
            }
        }
    }

    #[test]
    fn comb_identity_small() {
        assert_eq!(comb_identity(2).unwrap(), (2, 2));
        assert_eq!(comb_identity(3).unwrap(), (6, 6));
        assert_eq!(comb_identity(4).unwrap(), (14, 14));
        assert!(comb_identity(61).is_err());
        assert!(comb_identity(1).is_err());
    }

    #[test]
    fn d_constant_examples() {
        assert!((d_constant(2, 1.0, 2.0, 1.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((d_constant(2, 1.0, 2.0, 1e-300).unwrap() - 4.0).abs() < 1e-14);
        // 2^{1/2} + 15 > 16, so the second branch wins.
        assert!((d_constant(4, 0.5, 3.5, 1.0).unwrap() - (2f64.sqrt() + 15.0).powf(0.4)).abs() < 1e-12);
        assert!(d_constant(2, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (s, b, r2) = linear_fit(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && (r2 - 1.0).abs() < 1e-15);
    }
}
