//! Fourier side of sections on `Z^d`, `F_1` and `Z/n`: symbols on the dual torus.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::model::{Element, GroupFamily, GroupModel};
use super::section::WeightedSection;
use crate::error::{Error, Result};

/// Coefficients indexed by lattice points.
pub type LatticeTerms = Vec<(Vec<i64>, Complex64)>;

/// Dual-torus picture of a section: lattice dimension, period (for `Z/n`) and terms.
#[derive(Clone, Debug)]
pub struct TorusView {
    pub dim: usize,
    pub period: Option<u64>,
    pub terms: LatticeTerms,
}

pub fn torus_view(f: &WeightedSection) -> Result<TorusView> {
    let fam = f.group().family();
    let (dim, period) = match fam {
        GroupFamily::Lattice { dim } => (dim, None),
        GroupFamily::Free { rank: 1 } => (1, None),
        GroupFamily::Cyclic { n } => (1, Some(n)),
        _ => {
            return Err(Error::Unsupported {
                op: "torus symbol",
                carrier: fam.to_string(),
            })
        }
    };
    let terms = f
        .terms()
        .iter()
        .map(|(x, v)| {
            let k = match fam {
                GroupFamily::Free { .. } => vec![x.0.iter().sum()],
                _ => x.0.clone(),
            };
            (k, *v)
        })
        .collect();
    Ok(TorusView { dim, period, terms })
}

/// Rebuilds a section from lattice coefficients.
pub fn section_from_lattice(group: Arc<GroupModel>, terms: &[(Vec<i64>, Complex64)]) -> Result<WeightedSection> {
    let fam = group.family();
    let elems = terms.iter().map(|(k, v)| {
        let x = match fam {
            GroupFamily::Free { rank: 1 } => Element(vec![k[0].signum(); k[0].unsigned_abs() as usize]),
            GroupFamily::Cyclic { n } => Element(vec![k[0].rem_euclid(n as i64)]),
            _ => Element(k.clone()),
        };
        (x, *v)
    });
    WeightedSection::from_terms(group, elems)
}

/// `σ(θ) = Σ f(k) e^{i k·θ}`, summed directly.
pub fn eval_symbol(terms: &[(Vec<i64>, Complex64)], theta: &[f64]) -> Complex64 {
    terms
        .iter()
        .map(|(k, v)| {
            let phase: f64 = k.iter().zip(theta).map(|(&a, &t)| a as f64 * t).sum();
            v * Complex64::from_polar(1.0, phase)
        })
        .sum()
}

fn fft_axes(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + off + j * stride];
                }
                fft.process(&mut line);
                for (j, l) in line.iter().enumerate() {
                    data[base + off + j * stride] = *l;
                }
            }
        }
    }
}

/// Symbol values at `θ_j = 2π j / n` on each axis, row-major.
///
/// Coefficients are folded modulo `n`, so the result is exact only when the
/// support fits in a window of length `n` along every axis.
pub fn grid_values(dim: usize, terms: &[(Vec<i64>, Complex64)], n: usize) -> Vec<Complex64> {
    let mut data = vec![Complex64::new(0.0, 0.0); n.pow(dim as u32)];
    for (k, v) in terms {
        let mut idx = 0;
        for &a in k {
            idx = idx * n + a.rem_euclid(n as i64) as usize;
        }
        data[idx] += v;
    }
    // The inverse transform carries the e^{+i} kernel.
    fft_axes(&mut data, dim, n, true);
    data
}

/// Fourier coefficients `(1/n^d) Σ_j v_j e^{-i k·θ_j}` for centred `k`.
pub fn grid_coefficients(dim: usize, values: &[Complex64], n: usize) -> LatticeTerms {
    let mut data = values.to_vec();
    fft_axes(&mut data, dim, n, false);
    let scale = 1.0 / data.len() as f64;
    let centred = |j: usize| -> i64 {
        if j <= n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    };
    data.iter()
        .enumerate()
        .map(|(idx, v)| {
            let mut k = vec![0i64; dim];
            let mut rest = idx;
            for a in k.iter_mut().rev() {
                *a = centred(rest % n);
                rest /= n;
            }
            (k, v * scale)
        })
        .collect()
}

/// Width of the smallest box containing the support, per axis maximum.
pub fn support_span(terms: &[(Vec<i64>, Complex64)]) -> usize {
    let Some((first, _)) = terms.first() else {
        return 1;
    };
    let dim = first.len();
    (0..dim)
        .map(|a| {
            let lo = terms.iter().map(|t| t.0[a]).min().unwrap_or(0);
            let hi = terms.iter().map(|t| t.0[a]).max().unwrap_or(0);
            (hi - lo + 1) as usize
        })
        .max()
        .unwrap_or(1)
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `sup_θ |σ(θ)|` by grid search plus golden-section refinement of the top maxima.
pub fn torus_sup(view: &TorusView) -> Result<f64> {
    if view.terms.is_empty() {
        return Ok(0.0);
    }
    if let Some(n) = view.period {
        // Finite dual group: the grid is the whole spectrum.
        let v = grid_values(1, &view.terms, n as usize);
        return Ok(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let dim = view.dim;
    if dim == 0 {
        return Ok(view.terms.iter().map(|t| t.1).sum::<Complex64>().norm());
    }
    if dim > 2 {
        return Err(Error::Unsupported {
            op: "cstar_norm_abelian",
            carrier: format!("Z^{dim}"),
        });
    }
    let span = support_span(&view.terms);
    let base = if dim == 1 { 1usize << 14 } else { 1 << 7 };
    let n = base.max((8 * span).next_power_of_two());
    let vals = grid_values(dim, &view.terms, n);
    let abs: Vec<f64> = vals.iter().map(|z| z.norm()).collect();
    let grid_best = abs.iter().copied().fold(0.0, f64::max);
    let h = 2.0 * PI / n as f64;
    let idx = |i: usize, j: usize| (i % n) * if dim == 2 { n } else { 1 } + if dim == 2 { j % n } else { 0 };
    let mut peaks: Vec<(f64, usize)> = Vec::new();
    for (p, &v) in abs.iter().enumerate() {
        let (i, j) = if dim == 2 { (p / n, p % n) } else { (p, 0) };
        let mut is_peak = true;
        for di in [n - 1, 0, 1] {
            for dj in if dim == 2 { vec![n - 1, 0, 1] } else { vec![0] } {
                if (di, dj) != (0, 0) && abs[idx(i + di, j + dj)] > v {
                    is_peak = false;
                }
            }
        }
        if is_peak {
            peaks.push((v, p));
        }
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best = grid_best;
    for &(_, p) in peaks.iter().take(8) {
        let (i, j) = if dim == 2 { (p / n, p % n) } else { (p, 0) };
        let mut th = vec![i as f64 * h; 1];
        if dim == 2 {
            th.push(j as f64 * h);
        }
        for _round in 0..if dim == 2 { 4 } else { 1 } {
            for a in 0..dim {
                let c = th[a];
                let (x, v) = golden_max(c - h, c + h, |t| {
                    let mut q = th.clone();
                    q[a] = t;
                    eval_symbol(&view.terms, &q).norm()
                });
                th[a] = x;
                best = best.max(v);
            }
        }
    }
    Ok(best)
}

/// Norm of `f` in the reduced group C*-algebra of an abelian group: `sup |f̂|`.
pub fn cstar_norm_abelian(f: &WeightedSection) -> Result<f64> {
    if !f.group().is_abelian() {
        return Err(Error::Unsupported {
            op: "cstar_norm_abelian",
            carrier: f.group().family().to_string(),
        });
    }
    torus_sup(&torus_view(f)?)
}

/// Applies `g` pointwise to the symbol on an `n`-point grid and returns the coefficients.
pub fn apply_on_grid(
    view: &TorusView,
    n: usize,
    g: impl Fn(Complex64) -> Complex64,
) -> LatticeTerms {
    let n = view.period.map_or(n, |p| p as usize);
    let mut vals = grid_values(view.dim, &view.terms, n);
    for v in vals.iter_mut() {
        *v = g(*v);
    }
    grid_coefficients(view.dim, &vals, n)
}
