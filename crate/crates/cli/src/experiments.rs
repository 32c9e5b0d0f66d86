//! One function per experiment kind: parameters in, payload + tables + verdicts out.

use std::collections::BTreeMap;

use kpq_core::algebra::{AlgebraElement, AlgebraInstance, AlgebraKind, Carrier, DiffTriple, ElementJson};
use kpq_core::audit::{audit_with, iterated_check, kpq_ratio, size_scaling, SIZE_STEP_LIMIT};
use kpq_core::domar::{approx_identity_experiment, func_calc, spectral_mapping_check, FourierProfile};
use kpq_core::ensemble::{Ensemble, SamplerSpec};
use kpq_core::group::{regular_rep_norm, GroupFamily, WeightedSection};
use kpq_core::growth::{
    asymp_check, comb_identity, cosine_orbit_norm, d_constant, growth_trace_with, orbit_norms, u_of, GrowthOptions,
    TraceVerdict,
};
use kpq_core::matrix::{hermitian_eig, operator_norm};
use kpq_core::parallel::par_map;
use kpq_core::report::Table;
use kpq_core::rng::{derive_seed, random_hermitian, sample_rng};
use kpq_core::spectral::radius_equality_experiment;
use kpq_core::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    /// Observed value; `null` when not finite.
    pub value: Value,
    pub limit: Value,
    pub detail: String,
}

impl Verdict {
    /// `value ≤ limit`.
    fn at_most(check: &str, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self::flag(check, value <= limit, value, limit, detail)
    }

    fn flag(check: &str, ok: bool, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            value: num(value),
            limit: num(limit),
            detail: detail.into(),
        }
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

#[derive(Debug)]
pub struct Outcome {
    pub payload: Value,
    pub tables: Vec<(String, Table)>,
    pub verdicts: Vec<Verdict>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Outcome {
    fn new(payload: Value) -> Self {
        Self {
            payload,
            tables: Vec::new(),
            verdicts: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }

    fn table(&mut self, name: &str, t: Table) {
        self.tables.push((name.to_string(), t));
    }

    fn tol(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    match cfg.experiment {
        Experiment::Audit => audit_exp(cfg, jobs),
        Experiment::Iterate => iterate_exp(cfg, jobs),
        Experiment::Radius => radius_exp(cfg, jobs),
        Experiment::Growth => growth_exp(cfg, jobs),
        Experiment::Calculus => calculus_exp(cfg, jobs),
        Experiment::ApproxIdentity => approx_identity_exp(cfg),
        Experiment::RdRatio => rd_ratio_exp(cfg, jobs),
        Experiment::Norms => norms_exp(cfg),
        Experiment::Comb => comb_exp(cfg),
    }
}

fn instance(cfg: &ExperimentConfig) -> CliResult<AlgebraInstance> {
    Ok(AlgebraInstance::from_name(&cfg.instance_name()?)?)
}

fn triple(given: &Option<String>, inst: &AlgebraInstance) -> CliResult<DiffTriple> {
    match given {
        Some(s) => Ok(DiffTriple::parse(s)?),
        None => inst
            .declared()
            .cloned()
            .ok_or_else(|| CliError::Config(format!("instance `{}` has no declared triple; set `triple`", inst.name()))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Preset {
    /// Sum of the point masses at the symmetric generators, `δ₁ + δ₋₁` on `Z`.
    Generators,
}

fn fixed_element(inst: &AlgebraInstance, x: &Option<ElementJson>, preset: Option<Preset>) -> CliResult<Option<AlgebraElement>> {
    let el = match (x, preset) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either `x` or `preset`, not both".into())),
        (Some(j), None) => AlgebraElement::from_json(j)?,
        (None, Some(Preset::Generators)) => {
            let g = inst
                .group()
                .ok_or_else(|| CliError::Config(format!("preset `generators` needs a group instance, not {}", inst.name())))?;
            let one = Complex64::new(1.0, 0.0);
            AlgebraElement::Section(WeightedSection::from_terms(
                g.clone(),
                g.generators().iter().map(|x| (x.clone(), one)),
            )?)
        }
        (None, None) => return Ok(None),
    };
    inst.check_element(&el)?;
    Ok(Some(el))
}

fn sampler(given: &Option<SamplerSpec>, inst: &AlgebraInstance, size: usize) -> SamplerSpec {
    given.clone().unwrap_or_else(|| SamplerSpec::default_for(inst, size))
}

fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    values
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .fold(None, |acc, (i, v)| match acc {
            Some((_, best)) if best >= v => acc,
            _ => Some((i, v)),
        })
}

fn sample_detail(seed: u64, i: usize) -> String {
    format!("sample {i} (master seed {seed}, stream seed {})", derive_seed(seed, i as u64))
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditParams {
    triple: Option<String>,
    #[serde(default = "d200")]
    samples: usize,
    #[serde(default = "d16")]
    size: usize,
    sampler: Option<SamplerSpec>,
    /// Window sizes for a size-stability scan; `samples` are drawn per size.
    sizes: Option<Vec<usize>>,
    max_c_hat: Option<f64>,
}

fn d200() -> usize {
    200
}
fn d16() -> usize {
    16
}

fn audit_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: AuditParams = cfg.params()?;
    let seed = cfg.require_seed()?;
    let inst = instance(cfg)?;
    let tr = triple(&p.triple, &inst)?;
    let spec = sampler(&p.sampler, &inst, p.size);

    if let Some(sizes) = &p.sizes {
        let r = size_scaling(&inst, &tr, &spec, sizes, p.samples, seed, jobs)?;
        let mut out = Outcome::new(serde_json::to_value(&r)?);
        out.table("size_scaling", r.table());
        out.tol("max_size_step", SIZE_STEP_LIMIT);
        for (w, step) in r.rows.windows(2).zip(&r.successive_ratios) {
            out.verdicts.push(Verdict::at_most(
                &format!("size_step_{}_{}", w[0].size, w[1].size),
                *step,
                SIZE_STEP_LIMIT,
                format!(
                    "c_hat {} -> {} (size {} drawn from seed {})",
                    w[0].c_hat,
                    w[1].c_hat,
                    w[1].size,
                    derive_seed(seed, w[1].size as u64)
                ),
            ));
        }
        if let Some(limit) = p.max_c_hat {
            out.tol("max_c_hat", limit);
            for row in &r.rows {
                out.verdicts.push(Verdict::at_most(
                    &format!("c_hat_size_{}", row.size),
                    row.c_hat,
                    limit,
                    format!("size {} drawn from seed {}", row.size, derive_seed(seed, row.size as u64)),
                ));
            }
        }
        return Ok(out);
    }

    let r = audit_with(&inst, &tr, &spec, p.samples, seed, jobs)?;
    let mut out = Outcome::new(serde_json::to_value(&r)?);
    out.table("ratios", r.table());
    let worst = argmax(r.ratio_dump.iter().map(|v| v.unwrap_or(f64::NAN)));
    let detail = worst.map_or("no nonzero samples".to_string(), |(i, _)| format!("worst {}", sample_detail(seed, i)));
    match p.max_c_hat {
        Some(limit) => {
            out.tol("max_c_hat", limit);
            out.verdicts.push(Verdict::at_most("c_hat", r.c_hat, limit, detail));
        }
        None => out
            .verdicts
            .push(Verdict::flag("c_hat_finite", r.c_hat.is_finite(), r.c_hat, f64::INFINITY, detail)),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IterateParams {
    triple: Option<String>,
    #[serde(default = "d3")]
    n_max: u32,
    /// Constant of the inequality; estimated from a calibration audit when absent.
    c: Option<f64>,
    x: Option<ElementJson>,
    preset: Option<Preset>,
    sampler: Option<SamplerSpec>,
    #[serde(default = "d32")]
    size: usize,
    #[serde(default = "d200")]
    calibration_samples: usize,
}

fn d3() -> u32 {
    3
}
fn d32() -> usize {
    32
}

fn iterate_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: IterateParams = cfg.params()?;
    let inst = instance(cfg)?;
    let tr = triple(&p.triple, &inst)?;
    let spec = sampler(&p.sampler, &inst, p.size);
    let x = match fixed_element(&inst, &p.x, p.preset)? {
        Some(x) => x,
        None => spec.clone().self_adjoint(true).sample(&inst, &mut sample_rng(cfg.require_seed()?, 0))?,
    };
    let own = kpq_ratio(&x, &inst, &tr)?.ok_or_else(|| CliError::Config("x must be nonzero".into()))?;
    let (c, calibration) = match p.c {
        Some(c) => (c, Value::Null),
        None => {
            let seed = cfg.require_seed()?;
            let cal = audit_with(&inst, &tr, &spec, p.calibration_samples, derive_seed(seed, 1), jobs)?;
            let c = cal.c_hat.max(own);
            (c, json!({"samples": cal.samples, "seed": cal.seed, "c_hat": cal.c_hat, "x_ratio": own}))
        }
    };
    let r = iterated_check(&inst, &tr, c, &x, p.n_max)?;
    let mut out = Outcome::new(json!({
        "report": r,
        "x": x.to_json(),
        "calibration": calibration,
    }));
    out.table("iterated", r.table());
    out.tol("min_slack", 0.0);
    for row in &r.rows {
        out.verdicts.push(Verdict::flag(
            &format!("slack_n{}", row.n),
            row.slack >= 0.0,
            row.slack,
            0.0,
            format!("log lhs {} vs log rhs {} with C = {c}", row.log_lhs, row.log_rhs),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RadiusParams {
    #[serde(default = "d25")]
    samples: usize,
    #[serde(default = "d14")]
    m_max: u32,
    tolerance: Option<f64>,
    sampler: Option<SamplerSpec>,
    #[serde(default = "d16")]
    size: usize,
    support_radius: Option<usize>,
}

fn d25() -> usize {
    25
}
fn d14() -> u32 {
    14
}

fn radius_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: RadiusParams = cfg.params()?;
    let seed = cfg.require_seed()?;
    let inst = instance(cfg)?;
    let mut spec = sampler(&p.sampler, &inst, p.size).self_adjoint(true);
    if p.support_radius.is_some() {
        spec.support_radius = p.support_radius;
    }
    let e = radius_equality_experiment(&inst, &spec, p.samples, seed, p.m_max, p.tolerance, jobs)?;
    let mut t = Table::new(["sample", "seed", "gelfand_tail", "extrapolated", "oracle", "gap"]);
    t.meta("instance", &e.instance);
    t.meta("m_max", e.m_max);
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for s in &e.samples {
        t.row([
            s.index.to_string(),
            s.seed.to_string(),
            s.gelfand_tail.to_string(),
            s.extrapolated.to_string(),
            opt(s.oracle),
            opt(s.gap),
        ]);
    }
    let worst = argmax(e.samples.iter().map(|s| s.gap.unwrap_or(f64::NAN)));
    let mut out = Outcome::new(serde_json::to_value(&e)?);
    out.table("radius", t);
    out.tol("max_gap", e.tolerance);
    out.verdicts.push(Verdict::flag(
        "max_gap",
        e.pass,
        e.max_gap,
        e.tolerance,
        worst.map_or("no oracle values".into(), |(i, _)| {
            format!("worst sample {i} (stream seed {})", e.samples[i].seed)
        }),
    ));
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowthParams {
    x: Option<ElementJson>,
    preset: Option<Preset>,
    triple: Option<String>,
    #[serde(default = "d30")]
    t_max: f64,
    #[serde(default = "d40")]
    points: usize,
    t_min: Option<f64>,
    slack: Option<f64>,
    /// Upper limit on the fitted exponent.
    tau_max: Option<f64>,
    min_fit_quality: Option<f64>,
    oracle: Option<GrowthOracle>,
    #[serde(default = "d1e6")]
    oracle_tol: f64,
    sequence: Option<SequenceParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum GrowthOracle {
    /// Bessel series for `δ₁ + δ₋₁` on a weighted `ℓ¹(Z)`.
    Bessel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceParams {
    #[serde(default = "d256")]
    n_max: usize,
    triple: String,
    gamma: f64,
    c: Option<f64>,
}

fn d30() -> f64 {
    30.0
}
fn d40() -> usize {
    40
}
fn d1e6() -> f64 {
    1e-6
}
fn d256() -> usize {
    256
}

fn growth_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: GrowthParams = cfg.params()?;
    let inst = instance(cfg)?;
    let tr = triple(&p.triple, &inst)?;
    let x = fixed_element(&inst, &p.x, p.preset)?
        .ok_or_else(|| CliError::Config("growth needs `x` or `preset`".into()))?;
    let mut opts = GrowthOptions {
        t_min: p.t_min,
        jobs,
        ..GrowthOptions::default()
    };
    if let Some(s) = p.slack {
        opts.slack = s;
    }
    let mut trace = growth_trace_with(&x, &inst, &tr, p.t_max, p.points, opts)?;

    let mut out_verdicts = vec![Verdict::flag(
        "trace",
        trace.verdict == TraceVerdict::Pass,
        trace.tau_fit,
        trace.tau_bound,
        format!("verdict {:?}, fit R² {}", trace.verdict, trace.fit_quality),
    )];
    let mut tolerances = BTreeMap::new();
    tolerances.insert("trace_slack".to_string(), trace.slack);
    if let Some(tau_max) = p.tau_max {
        tolerances.insert("tau_max".into(), tau_max);
        out_verdicts.push(Verdict::at_most("tau_fit", trace.tau_fit, tau_max, ""));
    }
    if let Some(q) = p.min_fit_quality {
        tolerances.insert("min_fit_quality".into(), q);
        out_verdicts.push(Verdict::flag("fit_quality", trace.fit_quality >= q, trace.fit_quality, q, ""));
    }
    if let Some(GrowthOracle::Bessel) = p.oracle {
        let weight = match inst.kind() {
            AlgebraKind::WeightedL1 {
                group: GroupFamily::Lattice { dim: 1 },
                weight,
            } => *weight,
            _ => return Err(CliError::Config(format!("the Bessel oracle needs a weighted l1(Z) instance, not {}", inst.name()))),
        };
        let cosine = fixed_element(&inst, &None, Some(Preset::Generators))?.expect("preset resolves");
        if x != cosine {
            return Err(CliError::Config("the Bessel oracle applies to the `generators` element only".into()));
        }
        trace.attach_oracle(|t| cosine_orbit_norm(&weight, t));
        let gap = trace.oracle_gap().unwrap_or(f64::NAN);
        let worst = trace
            .norms
            .iter()
            .zip(trace.norm_oracle.as_deref().unwrap_or(&[]))
            .zip(&trace.t_grid)
            .map(|((a, b), t)| ((a - b).abs() / b.abs(), *t))
            .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc });
        tolerances.insert("oracle_rel".into(), p.oracle_tol);
        out_verdicts.push(Verdict::at_most("bessel_oracle", gap, p.oracle_tol, format!("worst at t = {}", worst.1)));
    }

    let mut sequence = Value::Null;
    let mut seq_table = None;
    if let Some(s) = &p.sequence {
        let st = DiffTriple::parse(&s.triple)?;
        let ns: Vec<usize> = (1..=s.n_max).collect();
        let norms = orbit_norms(&x, &inst, &ns, jobs)?;
        let c = match s.c {
            Some(c) => c,
            None => par_map(ns.len(), jobs, |j| {
                u_of(&x, &inst, ns[j] as f64).and_then(|u| kpq_ratio(&u, &inst, &st))
            })
            .into_iter()
            .collect::<kpq_core::Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .fold(0.0, f64::max),
        };
        let d = d_constant(st.k(), st.q_f64(), s.gamma, c)?;
        let a = |n: usize| -> kpq_core::Result<f64> {
            norms
                .get(n.wrapping_sub(1))
                .map(|v| d * (v + 1.0))
                .ok_or_else(|| kpq_core::Error::InvalidParameter(format!("index {n} outside the orbit scan")))
        };
        let r = asymp_check(a, st.k(), s.gamma, s.n_max)?;
        let mut t = Table::new(["n", "orbit_norm", "a_n", "log_bound", "log_ratio"]);
        t.meta("D", d);
        t.meta("c", c);
        for (e, v) in r.entries.iter().zip(&norms) {
            t.row([
                e.n.to_string(),
                v.to_string(),
                e.a_n.to_string(),
                e.log_bound.to_string(),
                e.log_ratio.to_string(),
            ]);
        }
        out_verdicts.push(Verdict::flag(
            "sequence_bound",
            r.holds,
            r.max_log_ratio,
            0.0,
            format!("worst n = {}, D = {d}, c = {c}, {} hypothesis pairs checked", r.worst_n, r.pairs_checked),
        ));
        sequence = json!({"triple": st.to_string(), "c": c, "d": d, "orbit_norms": norms, "report": r});
        seq_table = Some(t);
    }

    let mut out = Outcome::new(json!({"trace": trace, "x": x.to_json(), "sequence": sequence}));
    out.table("growth", trace.table());
    if let Some(t) = seq_table {
        out.table("sequence", t);
    }
    out.verdicts = out_verdicts;
    out.tolerances = tolerances;
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CalculusParams {
    #[serde(default = "default_profiles")]
    profiles: Vec<FourierProfile>,
    #[serde(default = "d50")]
    samples: usize,
    #[serde(default = "d2")]
    dim_min: usize,
    #[serde(default = "d16")]
    dim_max: usize,
    #[serde(default = "d1e7")]
    tol: f64,
    /// Rounding allowance added to `tol` in the oracle comparison.
    #[serde(default = "d1e9")]
    rounding: f64,
    #[serde(default = "d1e6")]
    hausdorff_tol: f64,
}

fn default_profiles() -> Vec<FourierProfile> {
    vec![FourierProfile::gaussian(1.0), FourierProfile::hat(2.0)]
}
fn d50() -> usize {
    50
}
fn d2() -> usize {
    2
}
fn d1e7() -> f64 {
    1e-7
}
fn d1e9() -> f64 {
    1e-9
}

struct CalcRow {
    dim: usize,
    profile: usize,
    op_error: f64,
    hausdorff: f64,
    nodes: usize,
    t_max: f64,
}

fn calculus_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: CalculusParams = cfg.params()?;
    let seed = cfg.require_seed()?;
    let inst = instance(cfg)?;
    if inst.carrier() != Carrier::Matrix {
        return Err(CliError::Config("calculus compares against an eigendecomposition and needs a matrix instance".into()));
    }
    if p.dim_min == 0 || p.dim_max < p.dim_min || p.profiles.is_empty() {
        return Err(CliError::Config("need 1 ≤ dim_min ≤ dim_max and at least one profile".into()));
    }
    let span = (p.dim_max - p.dim_min + 1) as u64;
    let rows = par_map(p.samples, jobs, |i| -> kpq_core::Result<Vec<CalcRow>> {
        let dim = p.dim_min + (derive_seed(seed, i as u64) % span) as usize;
        let a = random_hermitian(&mut sample_rng(seed, i as u64), dim);
        let eig = hermitian_eig(&a)?;
        let x = AlgebraElement::Matrix(a.clone());
        let mut out = Vec::new();
        for (j, f) in p.profiles.iter().enumerate() {
            let r = func_calc(f, &x, &inst, p.tol)?;
            let shift = if r.non_unital { r.f_zero } else { Complex64::new(0.0, 0.0) };
            let want = eig.apply(|l| f.value(l) - shift);
            let got = r.value.as_matrix().expect("matrix carrier");
            out.push(CalcRow {
                dim,
                profile: j,
                op_error: operator_norm(&got.try_sub(&want)?),
                hausdorff: spectral_mapping_check(f, &a, p.tol)?,
                nodes: r.nodes,
                t_max: r.t_max,
            });
        }
        Ok(out)
    })
    .into_iter()
    .collect::<kpq_core::Result<Vec<_>>>()?;

    let mut t = Table::new(["sample", "dim", "profile", "op_error", "hausdorff", "nodes", "t_max"]);
    t.meta("instance", inst.name());
    t.meta("tol", p.tol);
    let mut payload_rows = Vec::new();
    let (mut worst_op, mut worst_h) = ((0.0f64, String::new()), (0.0f64, String::new()));
    for (i, sample) in rows.iter().enumerate() {
        for r in sample {
            t.row([
                i.to_string(),
                r.dim.to_string(),
                r.profile.to_string(),
                r.op_error.to_string(),
                r.hausdorff.to_string(),
                r.nodes.to_string(),
                r.t_max.to_string(),
            ]);
            payload_rows.push(json!({
                "sample": i, "dim": r.dim, "profile": r.profile,
                "op_error": r.op_error, "hausdorff": r.hausdorff, "nodes": r.nodes, "t_max": r.t_max,
            }));
            let who = format!("{}, dim {}, profile {}", sample_detail(seed, i), r.dim, r.profile);
            if r.op_error.is_nan() || r.op_error > worst_op.0 {
                worst_op = (r.op_error, who.clone());
            }
            if r.hausdorff.is_nan() || r.hausdorff > worst_h.0 {
                worst_h = (r.hausdorff, who);
            }
        }
    }
    let mut out = Outcome::new(json!({
        "instance": inst.name(),
        "profiles": p.profiles,
        "tol": p.tol,
        "rows": payload_rows,
    }));
    out.table("calculus", t);
    out.tol("func_calc", p.tol);
    out.tol("oracle_rounding", p.rounding);
    out.tol("hausdorff", p.hausdorff_tol);
    out.verdicts.push(Verdict::at_most("oracle_error", worst_op.0, p.tol + p.rounding, worst_op.1));
    out.verdicts.push(Verdict::at_most("spectral_mapping", worst_h.0, p.hausdorff_tol, worst_h.1));
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxIdentityParams {
    profile: Option<FourierProfile>,
    #[serde(default = "d32")]
    size: usize,
    #[serde(default = "d8")]
    support: usize,
    #[serde(default = "default_grid")]
    n_grid: Vec<usize>,
    #[serde(default = "d1e6")]
    tol: f64,
}

fn d8() -> usize {
    8
}
fn default_grid() -> Vec<usize> {
    vec![4, 8, 16, 32]
}

fn approx_identity_exp(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p: ApproxIdentityParams = cfg.params()?;
    let seed = cfg.require_seed()?;
    let inst = instance(cfg)?;
    if p.support == 0 || p.support > p.size {
        return Err(CliError::Config(format!("support {} must lie in 1..={}", p.support, p.size)));
    }
    let f = p.profile.clone().unwrap_or_else(|| FourierProfile::unit_bump(0.3));
    let block = random_hermitian(&mut sample_rng(seed, 0), p.support);
    let a = ComplexMatrix::from_fn(p.size, |i, j| {
        if i < p.support && j < p.support {
            block[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let r = approx_identity_experiment(&inst, &f, &a, &p.n_grid, p.tol)?;
    let mut out = Outcome::new(json!({"profile": f, "report": r}));
    out.table("approx_identity", r.table());
    out.tol("residual", p.tol);
    out.tol("projection_gap", p.tol);
    let past = r.rows.iter().filter(|row| row.n >= r.support_radius);
    if let Some((n, v)) = past.map(|row| (row.n, row.residual)).fold(None, |acc: Option<(usize, f64)>, v| match acc {
        Some(a) if a.1 >= v.1 => Some(a),
        _ => Some(v),
    }) {
        out.verdicts.push(Verdict::at_most(
            "residual_past_support",
            v,
            p.tol,
            format!("worst N = {n}, support radius {}, block from {}", r.support_radius, sample_detail(seed, 0)),
        ));
    }
    let (n, gap) = r
        .rows
        .iter()
        .map(|row| (row.n, row.projection_gap))
        .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
    out.verdicts
        .push(Verdict::at_most("projection_gap", gap, p.tol, format!("worst N = {n}")));
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RdRatioParams {
    #[serde(default = "default_radii")]
    radii: Vec<usize>,
    #[serde(default = "d3usize")]
    samples_per_radius: usize,
    /// Ball radius used for the operator is `r + extra_radius`.
    #[serde(default = "d6")]
    extra_radius: usize,
    #[serde(default = "d1e9")]
    slack: f64,
}

fn default_radii() -> Vec<usize> {
    vec![1, 2, 3, 4, 5]
}
fn d3usize() -> usize {
    3
}
fn d6() -> usize {
    6
}

fn rd_ratio_exp(cfg: &ExperimentConfig, jobs: usize) -> CliResult<Outcome> {
    let p: RdRatioParams = cfg.params()?;
    let seed = cfg.require_seed()?;
    let inst = instance(cfg)?;
    if inst.carrier() != Carrier::Section {
        return Err(CliError::Config(format!("rd-ratio needs a group instance, not {}", inst.name())));
    }
    let jobs_list: Vec<(usize, usize)> = p
        .radii
        .iter()
        .flat_map(|&r| (0..p.samples_per_radius).map(move |s| (r, s)))
        .collect();
    let rows = par_map(jobs_list.len(), jobs, |j| -> kpq_core::Result<(f64, f64)> {
        let (r, _) = jobs_list[j];
        let spec = SamplerSpec {
            ensemble: Ensemble::Sphere,
            size: 0,
            band_beta: None,
            support_radius: Some(r),
            self_adjoint: false,
        };
        let x = spec.sample(&inst, &mut sample_rng(seed, j as u64))?;
        let f = x.as_section().expect("section carrier");
        Ok((f.l2_norm(), regular_rep_norm(f, r + p.extra_radius)?))
    })
    .into_iter()
    .collect::<kpq_core::Result<Vec<_>>>()?;

    let mut t = Table::new(["radius", "sample", "seed", "l2_norm", "operator_norm", "bound", "ratio"]);
    t.meta("instance", inst.name());
    t.meta("extra_radius", p.extra_radius);
    let mut payload_rows = Vec::new();
    let mut worst: Option<(f64, String)> = None;
    let mut all_ok = true;
    for (j, (&(r, s), &(l2, op))) in jobs_list.iter().zip(&rows).enumerate() {
        let bound = (r as f64 + 1.0) * l2 + p.slack;
        let ratio = op / l2;
        all_ok &= op <= bound;
        t.row([
            r.to_string(),
            s.to_string(),
            derive_seed(seed, j as u64).to_string(),
            l2.to_string(),
            op.to_string(),
            bound.to_string(),
            ratio.to_string(),
        ]);
        payload_rows.push(json!({"radius": r, "sample": s, "l2_norm": l2, "operator_norm": op, "bound": bound}));
        // normalised excess over the linear bound
        let excess = (op - bound) / l2;
        if worst.as_ref().is_none_or(|w| excess > w.0) {
            worst = Some((excess, format!("radius {r}, {}", sample_detail(seed, j))));
        }
    }
    let (excess, who) = worst.unwrap_or((f64::NEG_INFINITY, "no samples".into()));
    let mut out = Outcome::new(json!({"instance": inst.name(), "extra_radius": p.extra_radius, "rows": payload_rows}));
    out.table("rd_ratio", t);
    out.tol("bound_slack", p.slack);
    out.verdicts
        .push(Verdict::flag("linear_rd_bound", all_ok, excess, 0.0, format!("largest (norm - bound)/l2 at {who}")));
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormsParams {
    x: Option<ElementJson>,
    preset: Option<Preset>,
    sampler: Option<SamplerSpec>,
    #[serde(default = "d8")]
    size: usize,
    #[serde(default = "d10")]
    samples: usize,
}

fn d10() -> usize {
    10
}

fn norms_exp(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p: NormsParams = cfg.params()?;
    let inst = instance(cfg)?;
    let elements: Vec<(String, AlgebraElement)> = match fixed_element(&inst, &p.x, p.preset)? {
        Some(x) => vec![("given".into(), x)],
        None => {
            let seed = cfg.require_seed()?;
            let spec = sampler(&p.sampler, &inst, p.size);
            (0..p.samples)
                .map(|i| Ok((sample_detail(seed, i), spec.sample(&inst, &mut sample_rng(seed, i as u64))?)))
                .collect::<CliResult<_>>()?
        }
    };
    let mut t = Table::new(["element", "a_norm", "b_norm"]);
    t.meta("instance", inst.name());
    t.meta("b_norm_exact", inst.b_norm_is_exact());
    let mut payload_rows = Vec::new();
    let mut worst = (f64::NEG_INFINITY, String::new());
    for (who, x) in &elements {
        let (a, b) = (inst.a_norm(x)?, inst.b_norm(x)?);
        t.row([who.clone(), a.to_string(), b.to_string()]);
        payload_rows.push(json!({"element": who, "a_norm": a, "b_norm": b}));
        let excess = (b - a) / a.max(f64::MIN_POSITIVE);
        if excess > worst.0 {
            worst = (excess, who.clone());
        }
    }
    let mut out = Outcome::new(json!({"instance": inst.descriptor(), "rows": payload_rows}));
    out.table("norms", t);
    if inst.dominates_b() {
        out.tol("domination_rel", 1e-12);
        out.verdicts
            .push(Verdict::at_most("b_norm_le_a_norm", worst.0, 1e-12, format!("relative excess at {}", worst.1)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombParams {
    #[serde(default = "d2u32")]
    k_min: u32,
    #[serde(default = "d60")]
    k_max: u32,
}

fn d2u32() -> u32 {
    2
}
fn d60() -> u32 {
    60
}

fn comb_exp(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let p: CombParams = cfg.params()?;
    if p.k_min < 2 || p.k_max < p.k_min {
        return Err(CliError::Config(format!("need 2 ≤ k_min ≤ k_max (got {}..{})", p.k_min, p.k_max)));
    }
    let mut t = Table::new(["k", "lhs", "2^k-2"]);
    let mut rows = Vec::new();
    let mut bad = Vec::new();
    for k in p.k_min..=p.k_max {
        let (lhs, rhs) = comb_identity(k)?;
        if lhs != rhs {
            bad.push(k);
        }
        t.row([k.to_string(), lhs.to_string(), rhs.to_string()]);
        // u128 does not fit a JSON number losslessly
        rows.push(json!({"k": k, "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
    }
    let mut out = Outcome::new(json!({"rows": rows}));
    out.table("comb", t);
    out.verdicts.push(Verdict::flag(
        "exact_identity",
        bad.is_empty(),
        bad.len() as f64,
        0.0,
        if bad.is_empty() {
            format!("all k in {}..={}", p.k_min, p.k_max)
        } else {
            format!("mismatch at k = {bad:?}")
        },
    ));
    Ok(out)
}
