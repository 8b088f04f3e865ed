//! `generate`: sample a path from the configured system and policy.

use std::path::Path;

use irand_core::constructions::{sample_path, RealityPolicy};
use irand_core::model::{to_bits_string, ForecastingSystem, Situation};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{sidecar_path, timestamp, write_file, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub system: ForecastingSystem,
    pub system_name: String,
    pub policy: RealityPolicy,
    pub seed: u64,
    pub horizon: usize,
    pub precision_bits: u32,
    pub ones: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

pub fn generate(cfg: &ExperimentConfig) -> CliResult<Situation> {
    cfg.resolve()?;
    sample_path(&cfg.system, &cfg.policy, cfg.horizon, cfg.seed, cfg.precision_bits).map_err(|e| match e {
        irand_core::Error::OutOfDomain { .. } => CliError::config("horizon", e),
        e => CliError::internal(e),
    })
}

pub fn provenance(cfg: &ExperimentConfig, path: &Situation, deterministic: bool) -> Provenance {
    Provenance {
        tool: "irand",
        version: env!("CARGO_PKG_VERSION"),
        system: cfg.system.clone(),
        system_name: cfg.system.name(),
        policy: cfg.policy.clone(),
        seed: cfg.seed,
        horizon: path.len(),
        precision_bits: cfg.precision_bits,
        ones: path.count_ones(),
        generated_at_unix: timestamp(deterministic),
    }
}

/// Writes the `.bits` file and its provenance sidecar.
pub fn write_outputs(cfg: &ExperimentConfig, path: &Situation, out: &Path, deterministic: bool) -> CliResult<()> {
    write_file(out, &to_bits_string(path))?;
    write_json(&provenance(cfg, path, deterministic), Some(&sidecar_path(out)))
}
