//! Strict experiment configuration.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Audit,
    Iterate,
    Radius,
    Growth,
    Calculus,
    ApproxIdentity,
    RdRatio,
    Norms,
    Comb,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Audit => "audit",
            Experiment::Iterate => "iterate",
            Experiment::Radius => "radius",
            Experiment::Growth => "growth",
            Experiment::Calculus => "calculus",
            Experiment::ApproxIdentity => "approx-identity",
            Experiment::RdRatio => "rd-ratio",
            Experiment::Norms => "norms",
            Experiment::Comb => "comb",
        }
    }

    /// Default registry name when the config leaves `instance` out.
    pub fn default_instance(self) -> Option<&'static str> {
        match self {
            Experiment::Calculus => Some("cstar"),
            Experiment::ApproxIdentity => Some("jaffard:2"),
            Experiment::RdRatio => Some("l1w:f2:1"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(default = "empty_object")]
    pub parameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if !cfg.parameters.is_object() {
            return Err(CliError::Config("`parameters` must be a JSON object".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn instance_name(&self) -> CliResult<String> {
        self.instance
            .clone()
            .or_else(|| self.experiment.default_instance().map(str::to_string))
            .ok_or_else(|| CliError::Config(format!("experiment `{}` needs an `instance`", self.experiment.name())))
    }

    /// Parameters decoded into the experiment's own strict struct.
    pub fn params<P: DeserializeOwned>(&self) -> CliResult<P> {
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::Config(format!("parameters for `{}`: {e}", self.experiment.name())))
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            CliError::Config(format!(
                "experiment `{}` draws random samples and needs a `seed`",
                self.experiment.name()
            ))
        })
    }

    /// The fields that determine the numerical payload; `output_dir` is excluded.
    pub fn identity(&self) -> Value {
        serde_json::json!({
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "instance": self.instance,
            "parameters": self.parameters,
            "seed": self.seed,
        })
    }
}
