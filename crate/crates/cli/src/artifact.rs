//! `report.json` / `tables.csv` emission, digests and atomic directory swaps.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use kpq_core::report::Table;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::experiments::{Outcome, Status, Verdict};

pub const REPORT_FILE: &str = "report.json";
pub const TABLES_FILE: &str = "tables.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub versions: BTreeMap<String, String>,
    pub config: ExperimentConfig,
    pub config_digest: String,
    pub tolerances: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub status: Status,
    pub payload: Value,
    pub payload_digest: String,
    /// Wall-clock time; not covered by any digest.
    pub elapsed_seconds: f64,
}

/// SHA-256 of the compact serialisation; object keys come out sorted, so
/// equal values always hash equally.
pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("values always serialise");
    hex::encode(Sha256::digest(&bytes))
}

pub fn module_versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("kpq-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("kpq-core".to_string(), kpq_core::VERSION.to_string()),
    ])
}

impl Report {
    pub fn assemble(config: ExperimentConfig, outcome: &Outcome, elapsed_seconds: f64) -> Self {
        let status = if outcome.verdicts.iter().all(|v| v.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "kpq".into(),
            versions: module_versions(),
            config_digest: digest(&config.identity()),
            config,
            tolerances: outcome.tolerances.clone(),
            verdicts: outcome.verdicts.clone(),
            status,
            payload: outcome.payload.clone(),
            payload_digest: digest(&outcome.payload),
            elapsed_seconds,
        }
    }
}

/// Tables one after another, each introduced by `# table: name` and its
/// `# key: value` metadata.
pub fn write_tables(w: impl Write, tables: &[(String, Table)]) -> CliResult<()> {
    let mut w = w;
    for (i, (name, t)) in tables.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        writeln!(w, "# table: {name}")?;
        for (k, v) in &t.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut csv = csv::Writer::from_writer(&mut w);
        csv.write_record(&t.header)?;
        for row in &t.rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
    }
    Ok(())
}

/// Writes both artifacts into a sibling temp dir, then renames it onto `out`.
pub fn write_atomic(out: &Path, report: &Report, tables: &[(String, Table)]) -> CliResult<()> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => Path::new(".").to_path_buf(),
    };
    fs::create_dir_all(&parent)?;
    let staging = tempfile::Builder::new().prefix(".kpq-staging-").tempdir_in(&parent)?;
    {
        let mut f = fs::File::create(staging.path().join(REPORT_FILE))?;
        serde_json::to_writer_pretty(&mut f, report)?;
        writeln!(f)?;
        f.sync_all()?;
    }
    {
        let f = fs::File::create(staging.path().join(TABLES_FILE))?;
        let mut w = std::io::BufWriter::new(f);
        write_tables(&mut w, tables)?;
        w.flush()?;
    }
    let staged = staging.keep();
    if out.exists() {
        if !out.is_dir() {
            fs::remove_dir_all(&staged)?;
            return Err(CliError::Report(format!("{} exists and is not a directory", out.display())));
        }
        let old = tempfile::Builder::new().prefix(".kpq-previous-").tempdir_in(&parent)?.keep();
        fs::remove_dir(&old)?;
        fs::rename(out, &old)?;
        if let Err(e) = fs::rename(&staged, out) {
            fs::rename(&old, out)?;
            return Err(e.into());
        }
        fs::remove_dir_all(&old)?;
    } else {
        fs::rename(&staged, out)?;
    }
    Ok(())
}
