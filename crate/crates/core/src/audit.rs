//! Empirical constants for `‖a^k‖_A ≤ C ‖a‖_A^p ‖a‖_B^q` and its iterates.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraInstance, DiffTriple, DiffTripleJson};
use crate::ensemble::SamplerSpec;
use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::report::Table;
use crate::rng::{derive_seed, sample_rng};
use crate::spectral::scaled_log_power_norms;

/// `y^k` by repeated squaring.
pub fn element_power(y: &AlgebraElement, k: u32) -> Result<AlgebraElement> {
    if k == 0 {
        return Ok(y.unit());
    }
    let mut result: Option<AlgebraElement> = None;
    let mut base = y.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.mul(&base)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base)?;
        }
    }
    Ok(result.expect("k ≥ 1"))
}

/// `‖a^k‖_A / (‖a‖_A^p ‖a‖_B^q)`, evaluated through logarithms; `None` when a norm vanishes.
pub fn kpq_ratio(x: &AlgebraElement, inst: &AlgebraInstance, triple: &DiffTriple) -> Result<Option<f64>> {
    let na = inst.a_norm(x)?;
    let nb = inst.b_norm(x)?;
    if na == 0.0 || nb == 0.0 {
        return Ok(None);
    }
    let nk = inst.a_norm(&element_power(x, triple.k())?)?;
    let log = nk.ln() - triple.p_f64() * na.ln() - triple.q_f64() * nb.ln();
    if !log.is_finite() && nk != 0.0 {
        return Err(Error::NonFinite("audit ratio".into()));
    }
    Ok(Some(log.exp()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub count: usize,
    pub skipped: usize,
    pub min: f64,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    pub max: f64,
}

impl RatioStats {
    fn from_ratios(ratios: &[Option<f64>]) -> Self {
        let mut v: Vec<f64> = ratios.iter().flatten().copied().collect();
        let skipped = ratios.len() - v.len();
        if v.is_empty() {
            return Self {
                count: 0,
                skipped,
                min: 0.0,
                mean: 0.0,
                q50: 0.0,
                q90: 0.0,
                q99: 0.0,
                max: 0.0,
            };
        }
        // The mean is summed in sample order so it does not depend on scheduling.
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Self {
            count: v.len(),
            skipped,
            min: v[0],
            mean,
            q50: q(0.5),
            q90: q(0.9),
            q99: q(0.99),
            max: v[v.len() - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeRow {
    pub size: usize,
    pub samples: usize,
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub instance: String,
    pub triple: DiffTripleJson,
    pub sampler: SamplerSpec,
    pub samples: usize,
    pub seed: u64,
    pub ratios: RatioStats,
    /// Largest observed ratio; an empirical lower bound on the best constant.
    pub c_hat: f64,
    pub per_size: Vec<SizeRow>,
    /// Per-sample ratios in sample order; `None` for skipped zero-norm draws.
    pub ratio_dump: Vec<Option<f64>>,
}

impl AuditReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["sample", "size", "ratio"]);
        t.meta("instance", &self.instance);
        t.meta("seed", self.seed);
        t.meta("c_hat", self.c_hat);
        for (i, r) in self.ratio_dump.iter().enumerate() {
            t.row([
                i.to_string(),
                self.sampler.size.to_string(),
                r.map(|v| v.to_string()).unwrap_or_else(|| "skipped".into()),
            ]);
        }
        t
    }
}

pub fn audit(
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    spec: &SamplerSpec,
    n_samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    audit_with(inst, triple, spec, n_samples, seed, 1)
}

/// Sample `i` is drawn from the stream `sample_rng(seed, i)`, so reports do
/// not depend on `jobs`.
pub fn audit_with(
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    spec: &SamplerSpec,
    n_samples: usize,
    seed: u64,
    jobs: usize,
) -> Result<AuditReport> {
    let ratios = par_map(n_samples, jobs, |i| {
        let mut rng = sample_rng(seed, i as u64);
        let x = spec.sample(inst, &mut rng)?;
        if x.is_zero() {
            return Ok(None);
        }
        kpq_ratio(&x, inst, triple)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let stats = RatioStats::from_ratios(&ratios);
    let c_hat = stats.max;
    Ok(AuditReport {
        instance: inst.name().to_string(),
        triple: triple.into(),
        sampler: spec.clone(),
        samples: n_samples,
        seed,
        per_size: vec![SizeRow {
            size: spec.size,
            samples: stats.count,
            c_hat,
        }],
        ratios: stats,
        c_hat,
        ratio_dump: ratios,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IteratedRow {
    pub n: u32,
    /// `ln ‖a^{k^n}‖_A`.
    pub log_lhs: f64,
    /// `n ln C + p^n ln‖a‖_A + (k^n − p^n) ln‖a‖_B`.
    pub log_rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IteratedReport {
    pub instance: String,
    pub triple: String,
    pub c: f64,
    pub rows: Vec<IteratedRow>,
    pub min_slack: f64,
    pub holds: bool,
}

impl IteratedReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["n", "log_lhs", "log_rhs", "slack"]);
        t.meta("instance", &self.instance);
        t.meta("triple", &self.triple);
        t.meta("c", self.c);
        for r in &self.rows {
            t.row([r.n.to_string(), r.log_lhs.to_string(), r.log_rhs.to_string(), r.slack.to_string()]);
        }
        t
    }
}

/// Checks `‖a^{k^n}‖_A ≤ C^n ‖a‖_A^{p^n} ‖a‖_B^{k^n − p^n}` for `n = 1..=n_max` in logarithms.
pub fn iterated_check(
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    c: f64,
    x: &AlgebraElement,
    n_max: u32,
) -> Result<IteratedReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!("constant c = {c} must be positive")));
    }
    let k = triple.k();
    let kf = k as f64;
    if kf.powi(n_max as i32) > 1e300 {
        return Err(Error::Overflow(format!("k^n for n = {n_max}")));
    }
    let scaled = scaled_log_power_norms(x, inst, k, n_max, false)?;
    let la = inst.a_norm(x)?.ln();
    let lb = inst.b_norm(x)?.ln();
    let p = triple.p_f64();
    let rows: Vec<IteratedRow> = (1..=n_max)
        .map(|n| {
            let kn = kf.powi(n as i32);
            let pn = p.powi(n as i32);
            let log_lhs = scaled[n as usize] * kn;
            let log_rhs = n as f64 * c.ln() + pn * la + (kn - pn) * lb;
            IteratedRow {
                n,
                log_lhs,
                log_rhs,
                slack: log_rhs - log_lhs,
            }
        })
        .collect();
    let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    Ok(IteratedReport {
        instance: inst.name().to_string(),
        triple: triple.to_string(),
        c,
        holds: rows.iter().all(|r| r.slack >= 0.0 || r.log_lhs == f64::NEG_INFINITY),
        rows,
        min_slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub instance: String,
    pub triple: String,
    pub rows: Vec<SizeRow>,
    /// `c_hat(size_{j+1}) / c_hat(size_j)`.
    pub successive_ratios: Vec<f64>,
    pub max_step: f64,
    pub pass: bool,
}

impl ScalingReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["size", "samples", "c_hat"]);
        t.meta("instance", &self.instance);
        t.meta("triple", &self.triple);
        for r in &self.rows {
            t.row([r.size.to_string(), r.samples.to_string(), r.c_hat.to_string()]);
        }
        t
    }
}

/// Largest allowed growth of `c_hat` from one window size to the next.
pub const SIZE_STEP_LIMIT: f64 = 1.1;

/// `c_hat` per window size, each size drawing from its own derived seed.
pub fn size_scaling(
    inst: &AlgebraInstance,
    triple: &DiffTriple,
    spec: &SamplerSpec,
    sizes: &[usize],
    per_size: usize,
    seed: u64,
    jobs: usize,
) -> Result<ScalingReport> {
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sizes must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let s = SamplerSpec { size, ..spec.clone() };
        let r = audit_with(inst, triple, &s, per_size, derive_seed(seed, size as u64), jobs)?;
        rows.push(SizeRow {
            size,
            samples: r.ratios.count,
            c_hat: r.c_hat,
        });
    }
    let successive_ratios: Vec<f64> = rows.windows(2).map(|w| w[1].c_hat / w[0].c_hat).collect();
    let max_step = successive_ratios.iter().copied().fold(0.0, f64::max);
    Ok(ScalingReport {
        instance: inst.name().to_string(),
        triple: triple.to_string(),
        pass: successive_ratios.iter().all(|r| *r <= SIZE_STEP_LIMIT),
        rows,
        successive_ratios,
        max_step,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use num_complex::Complex64;

    #[test]
    fn scalar_ratio_is_one() {
        let inst = AlgebraInstance::from_name("schatten:1").unwrap();
        let t = DiffTriple::parse("2,1,1").unwrap();
        let x = AlgebraElement::Matrix(ComplexMatrix::from_complex_diag(&[Complex64::new(-1.7, 0.4)]));
        let r = kpq_ratio(&x, &inst, &t).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-15);
        let zero = AlgebraElement::Matrix(ComplexMatrix::zeros(3));
        assert_eq!(kpq_ratio(&zero, &inst, &t).unwrap(), None);
    }

    #[test]
    fn normalized_iterate_is_direct() {
        // A unitary diagonal: ‖x‖_A = ‖x‖_B = 1 in the operator norm.
        let inst = AlgebraInstance::from_name("cstar").unwrap();
        let t = DiffTriple::parse("2,1,1").unwrap();
        let x = AlgebraElement::Matrix(ComplexMatrix::from_complex_diag(&[
            Complex64::from_polar(1.0, 0.3),
            Complex64::from_polar(1.0, -2.0),
        ]));
        let r = iterated_check(&inst, &t, 1.0, &x, 4).unwrap();
        for row in &r.rows {
            assert!(row.log_rhs.abs() < 1e-15);
            assert!(row.log_lhs.abs() < 1e-12);
        }
    }
}
