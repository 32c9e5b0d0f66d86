//! Spectral radii through Gelfand's formula in the A-norm, and spectra on the B side.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraInstance};
use crate::ensemble::{sample_nonzero, SamplerSpec};
use crate::error::{Error, Result};
use crate::group::cstar_norm_abelian;
use crate::matrix::{hermitian_eig, ComplexMatrix};
use crate::parallel::par_map;
use crate::rng::{derive_seed, sample_rng};

/// Coefficients below this fraction of the largest one are dropped between
/// squarings of group-algebra elements.
pub const PRUNE_RELATIVE: f64 = 1e-20;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn pruned(x: AlgebraElement, prune: bool) -> AlgebraElement {
    match x {
        AlgebraElement::Section(s) if prune => AlgebraElement::Section(s.pruned(PRUNE_RELATIVE)),
        other => other,
    }
}

fn power(y: &AlgebraElement, k: u32, prune: bool) -> Result<AlgebraElement> {
    let mut result: Option<AlgebraElement> = None;
    let mut base = y.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => pruned(r.mul(&base)?, prune),
            });
        }
        e >>= 1;
        if e > 0 {
            base = pruned(base.mul(&base)?, prune);
        }
    }
    Ok(result.expect("k ≥ 1"))
}

/// `ln ‖x^{k^n}‖_A / k^n` for `n = 0..=n_max`, by renormalized powering.
///
/// The stage values are exact logs of the actual norms up to rounding in the
/// products; `-∞` marks a vanishing power (and every later one).
pub fn scaled_log_power_norms(
    x: &AlgebraElement,
    inst: &AlgebraInstance,
    k: u32,
    n_max: u32,
    prune: bool,
) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("power base k = {k} < 2")));
    }
    let n0 = inst.a_norm(x)?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    if n0 == 0.0 {
        out.resize(n_max as usize + 1, f64::NEG_INFINITY);
        return Ok(out);
    }
    if !n0.is_finite() {
        return Err(Error::Overflow("initial A-norm".into()));
    }
    let mut y = x.scale_real(1.0 / n0);
    let mut acc = CompensatedSum::default();
    acc.add(n0.ln());
    out.push(acc.value());
    let mut scale = 1.0f64;
    for _ in 1..=n_max {
        scale *= k as f64;
        let z = power(&y, k, prune)?;
        let s = inst.a_norm(&z)?;
        if s == 0.0 {
            out.resize(n_max as usize + 1, f64::NEG_INFINITY);
            return Ok(out);
        }
        if !s.is_finite() {
            return Err(Error::Overflow(format!("A-norm of a power at stage {}", out.len())));
        }
        acc.add(s.ln() / scale);
        out.push(acc.value());
        y = z.scale_real(1.0 / s);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GelfandSample {
    pub n: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    /// `(n, ‖aⁿ‖_A^{1/n})` at `n = 2^m`.
    pub sequence: Vec<GelfandSample>,
    /// Last raw sample.
    pub gelfand_tail: f64,
    /// Heuristic limit from fitting `r + c 2^{-m}` to the last three envelope values.
    pub extrapolated: f64,
    pub oracle: Option<f64>,
    pub gap: Option<f64>,
}

/// Fits `r + c 2^{-m}` to the last three samples when they are monotone;
/// otherwise returns the last sample.
///
/// Norms that are submultiplicative only up to a constant give increasing
/// sequences, so no nonincreasing envelope is imposed.
pub fn extrapolate(values: &[f64]) -> f64 {
    let Some(&last) = values.last() else {
        return 0.0;
    };
    if values.len() < 3 || last == 0.0 {
        return last.max(0.0);
    }
    let m0 = values.len() - 3;
    let (a, b, c) = (values[m0], values[m0 + 1], values[m0 + 2]);
    let monotone = (a >= b && b >= c) || (a <= b && b <= c);
    if !monotone {
        return last.max(0.0);
    }
    let pts: Vec<(f64, f64)> = (m0..values.len()).map(|m| (0.5f64.powi(m as i32), values[m])).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx).max(0.0)
}

/// Default tolerance `10^{-⌊m_max/5⌋}`.
pub fn tolerance_schedule(m_max: u32) -> f64 {
    10f64.powi(-((m_max / 5) as i32))
}

/// B-side spectral radius when it is computable exactly.
pub fn radius_oracle(x: &AlgebraElement) -> Result<Option<f64>> {
    match x {
        AlgebraElement::Matrix(a) => {
            if a.is_hermitian() {
                Ok(Some(hermitian_eig(a)?.spectral_radius()))
            } else {
                match spectrum_b(a) {
                    Ok(s) => Ok(Some(s.iter().map(|z| z.norm()).fold(0.0, f64::max))),
                    Err(Error::NotNormal { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
        AlgebraElement::Section(f) => {
            if f.group().is_abelian() || f.integer_terms().is_some() {
                Ok(Some(cstar_norm_abelian(f)?))
            } else {
                Ok(None)
            }
        }
        AlgebraElement::Trig(f) => Ok(Some(f.sup_norm())),
    }
}

pub fn gelfand_radius(x: &AlgebraElement, inst: &AlgebraInstance, m_max: u32) -> Result<RadiusReport> {
    if m_max > 24 {
        return Err(Error::InvalidParameter(format!("m_max = {m_max} exceeds 24")));
    }
    let logs = scaled_log_power_norms(x, inst, 2, m_max, true)?;
    let sequence: Vec<GelfandSample> = logs
        .iter()
        .enumerate()
        .map(|(m, &l)| GelfandSample {
            n: 1u64 << m,
            value: l.exp(),
        })
        .collect();
    let values: Vec<f64> = sequence.iter().map(|s| s.value).collect();
    let extrapolated = extrapolate(&values);
    let oracle = radius_oracle(x)?;
    Ok(RadiusReport {
        gelfand_tail: *values.last().expect("m = 0 is always present"),
        extrapolated,
        gap: oracle.map(|o| (extrapolated - o).abs()),
        oracle,
        sequence,
    })
}

/// Eigenvalues of a normal matrix (ascending by real, then imaginary part).
pub fn spectrum_b(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let scale = 1.0 + a.max_abs();
    if a.is_hermitian() {
        return Ok(hermitian_eig(a)?.eigenvalues.into_iter().map(|l| Complex64::new(l, 0.0)).collect());
    }
    let ad = a.adjoint();
    let defect = (&ad * a).max_abs_diff(&(a * &ad));
    if defect > 1e-10 * scale * scale {
        return Err(Error::NotNormal { deviation: defect });
    }
    // Commuting Hermitian parts share eigenvectors; a generic real combination separates them.
    let h = a.hermitian_part();
    let k = a.try_sub(&ad)?.scale(Complex64::new(0.0, -0.5));
    let mix = h.try_add(&k.scale_real(std::f64::consts::FRAC_1_SQRT_2 - 0.1))?.hermitian_part();
    let eig = hermitian_eig(&mix)?;
    let n = a.dim();
    let v = &eig.vectors;
    let mut vals: Vec<Complex64> = (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                let mut av = Complex64::new(0.0, 0.0);
                for c in 0..n {
                    av += a[(r, c)] * v[(c, j)];
                }
                acc += v[(r, j)].conj() * av;
            }
            acc
        })
        .collect();
    vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(vals)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusSampleReport {
    pub index: usize,
    pub seed: u64,
    pub gelfand_tail: f64,
    pub extrapolated: f64,
    pub oracle: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusExperiment {
    pub instance: String,
    pub seed: u64,
    pub m_max: u32,
    pub tolerance: f64,
    pub samples: Vec<RadiusSampleReport>,
    pub max_gap: f64,
    pub pass: bool,
}

/// Gelfand-limit versus B-side oracle over random self-adjoint samples.
pub fn radius_equality_experiment(
    inst: &AlgebraInstance,
    spec: &SamplerSpec,
    samples: usize,
    seed: u64,
    m_max: u32,
    tolerance: Option<f64>,
    jobs: usize,
) -> Result<RadiusExperiment> {
    let spec = spec.clone().self_adjoint(true);
    let tolerance = tolerance.unwrap_or_else(|| tolerance_schedule(m_max));
    let rows = par_map(samples, jobs, |i| -> Result<RadiusSampleReport> {
        let x = sample_nonzero(&spec, inst, &mut sample_rng(seed, i as u64))?;
        let r = gelfand_radius(&x, inst, m_max)?;
        Ok(RadiusSampleReport {
            index: i,
            seed: derive_seed(seed, i as u64),
            gelfand_tail: r.gelfand_tail,
            extrapolated: r.extrapolated,
            oracle: r.oracle,
            gap: r.gap,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|r| r.oracle.is_none()) {
        return Err(Error::Unsupported {
            op: "radius_equality_experiment",
            carrier: format!("{} (no B-side oracle)", inst.name()),
        });
    }
    let max_gap = rows.iter().filter_map(|r| r.gap).fold(0.0, f64::max);
    Ok(RadiusExperiment {
        instance: inst.name().to_string(),
        seed,
        m_max,
        tolerance,
        pass: max_gap <= tolerance,
        samples: rows,
        max_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupModel, WeightedSection};
    use crate::rng::random_hermitian;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nilpotent_and_diagonal() {
        let inst = AlgebraInstance::from_name("cstar").unwrap();
        let mut n = ComplexMatrix::zeros(2);
        n[(0, 1)] = c(1.0, 0.0);
        let r = gelfand_radius(&AlgebraElement::Matrix(n), &inst, 6).unwrap();
        assert_eq!(r.sequence[1].value, 0.0);
        assert_eq!(r.extrapolated, 0.0);
        assert_eq!(r.oracle, None);
        let d = AlgebraElement::Matrix(ComplexMatrix::from_real_diag(&[2.0, -1.0]));
        for name in ["cstar", "schatten:1", "jaffard:2", "bgs:1:1"] {
            let r = gelfand_radius(&d, &AlgebraInstance::from_name(name).unwrap(), 12).unwrap();
            assert!((r.extrapolated - 2.0).abs() < 1e-9, "{name}: {}", r.extrapolated);
            assert_eq!(r.oracle, Some(2.0));
        }
    }

    #[test]
    fn zero_element() {
        let inst = AlgebraInstance::from_name("schatten:2").unwrap();
        let r = gelfand_radius(&AlgebraElement::Matrix(ComplexMatrix::zeros(3)), &inst, 5).unwrap();
        assert_eq!(r.extrapolated, 0.0);
        assert_eq!(r.gap, Some(0.0));
    }

    #[test]
    fn weighted_z_generator_sum() {
        let inst = AlgebraInstance::from_name("l1w:z:poly-2").unwrap();
        let g = inst.group().unwrap().clone();
        let phi = WeightedSection::on_integers(g, &[(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        let r = gelfand_radius(&AlgebraElement::Section(phi), &inst, 14).unwrap();
        assert!((r.oracle.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.gap.unwrap() <= 1e-2, "{:?}", r);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        assert_eq!(s.value(), 1.0 + 1e-15);
    }

    #[test]
    fn extrapolation_removes_first_order_term() {
        let vals: Vec<f64> = (0..12).map(|m| 1.5 + 0.7 * 0.5f64.powi(m)).collect();
        assert!((extrapolate(&vals) - 1.5).abs() < 1e-12);
        let up: Vec<f64> = (0..12).map(|m| 1.5 - 0.7 * 0.5f64.powi(m)).collect();
        assert!((extrapolate(&up) - 1.5).abs() < 1e-12);
        assert_eq!(extrapolate(&[3.0, 1.0, 2.0, 1.5]), 1.5);
        assert_eq!(tolerance_schedule(14), 1e-2);
        assert_eq!(tolerance_schedule(20), 1e-4);
    }

    #[test]
    fn spectrum_examples() {
        let sx = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = spectrum_b(&sx).unwrap();
        assert!((s[0] - c(-1.0, 0.0)).norm() < 1e-14 && (s[1] - c(1.0, 0.0)).norm() < 1e-14);
        let d = ComplexMatrix::from_complex_diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let s = spectrum_b(&d).unwrap();
        assert!((s[0] - c(0.0, -1.0)).norm() < 1e-14 && (s[1] - c(0.0, 1.0)).norm() < 1e-14);
        let mut j = ComplexMatrix::zeros(2);
        j[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(spectrum_b(&j), Err(Error::NotNormal { .. })));
    }

    #[test]
    fn spectrum_of_normal_matrices_matches_construction() {
        let mut rng = sample_rng(11, 0);
        for n in [3usize, 6] {
            let u = hermitian_eig(&random_hermitian(&mut rng, n)).unwrap().vectors;
            let lambdas: Vec<Complex64> = (0..n).map(|i| c(i as f64 - 1.3, (i as f64 * 0.7).sin())).collect();
            let a = &(&u * &ComplexMatrix::from_complex_diag(&lambdas)) * &u.adjoint();
            let mut want = lambdas.clone();
            want.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            for (g, w) in spectrum_b(&a).unwrap().iter().zip(&want) {
                assert!((g - w).norm() < 1e-10);
            }
        }
        let h = random_hermitian(&mut rng, 6);
        let s = spectrum_b(&h).unwrap();
        let e = hermitian_eig(&h).unwrap();
        for (z, l) in s.iter().zip(&e.eigenvalues) {
            assert_eq!(z.im, 0.0);
            assert_eq!(z.re, *l);
        }
    }

    #[test]
    fn raw_tail_never_below_b_radius() {
        let mut rng = sample_rng(5, 0);
        for name in ["cstar", "schatten:1", "schatten:3", "groschur:1:1", "beurling:1:2"] {
            let inst = AlgebraInstance::from_name(name).unwrap();
            let x = AlgebraElement::Matrix(random_hermitian(&mut rng, 6));
            let r = gelfand_radius(&x, &inst, 10).unwrap();
            assert!(r.gelfand_tail >= r.oracle.unwrap() - 1e-9);
        }
    }

    #[test]
    fn section_radius_on_free_rank_one() {
        let g = Arc::new(GroupModel::free(1));
        let inst = AlgebraInstance::new(
            "l1w:f1:1",
            crate::algebra::AlgebraKind::WeightedL1 {
                group: g.family(),
                weight: crate::group::Weight::Constant,
            },
        )
        .unwrap();
        let f = WeightedSection::from_terms(g.clone(), g.generators().iter().map(|x| (x.clone(), c(1.0, 0.0)))).unwrap();
        let r = gelfand_radius(&AlgebraElement::Section(f), &inst, 10).unwrap();
        assert!((r.oracle.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.gap.unwrap() < 1e-2);
    }
}
