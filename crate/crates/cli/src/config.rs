//! Experiment configuration: the JSON file given with `--config`, merged
//! with command-line overrides, then resolved into built library objects.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use irand_core::constructions::RealityPolicy;
use irand_core::martingale::{BettingStrategy, PositionRule, StrategySpec};
use irand_core::model::{parse_bits, ForecastingSystem, GrowthFunction, Situation};
use irand_core::scalar::{parse_rational, serde_rational};
use irand_core::stochasticity::{SelectionProcess, SelectionSpec, Surrogate};
use irand_core::{rational, Interval, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: ForecastingSystem,
    /// How `generate` draws outcomes from the forecasts.
    pub policy: RealityPolicy,
    pub strategies: Vec<StrategySpec>,
    /// Defaults to all ones plus the two parity selections.
    pub selections: Option<Vec<SelectionSpec>>,
    pub horizon: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub thresholds: Thresholds,
    /// Interval the Church verdict tests; defaults to the forecast envelope
    /// along the analysed path.
    pub church_interval: Option<Interval>,
    pub growth: GrowthFunction,
    /// Multipliers validated exactly per strategy before the replay.
    pub audit_steps: usize,
    /// Longest horizon replayed with exact capital; beyond it, log2 capital.
    pub exact_capital_limit: usize,
    pub martingale_estimate: Option<MartingaleEstimateConfig>,
    pub construct: ConstructConfig,
    pub outputs: Outputs,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: ForecastingSystem::precise(rational(1, 2)).expect("1/2 is a probability"),
            policy: RealityPolicy::AtMid,
            strategies: Vec::new(),
            selections: None,
            horizon: 1000,
            seed: 0,
            precision_bits: 32,
            thresholds: Thresholds::default(),
            church_interval: None,
            growth: GrowthFunction::Sqrt,
            audit_steps: 1000,
            exact_capital_limit: 10_000,
            martingale_estimate: Some(MartingaleEstimateConfig::default()),
            construct: ConstructConfig::default(),
            outputs: Outputs::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// log2 capital counted as crossing.
    pub log2: f64,
    #[serde(with = "serde_rational")]
    pub tol: Rational,
    pub burn_in: usize,
    pub min_count: u64,
    pub surrogate: Surrogate,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { log2: 20.0, tol: rational(0, 1), burn_in: 30, min_count: 30, surrogate: Surrogate::TailWindow }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MartingaleEstimateConfig {
    /// Stakes as `"num/den"` strings.
    pub lambdas: Vec<String>,
    pub resolution_bits: u32,
}

impl Default for MartingaleEstimateConfig {
    fn default() -> Self {
        Self { lambdas: vec!["1/2".into(), "1/8".into(), "1/32".into()], resolution_bits: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructConfig {
    pub greedy: Option<GreedyConfig>,
    pub diagonal: Option<DiagonalConfig>,
    pub double_or_hold: DoubleOrHoldConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreedyConfig {
    pub strategy: StrategySpec,
    #[serde(with = "serde_rational", default = "one")]
    pub y: Rational,
    /// Starting prefix as a bit string.
    #[serde(default)]
    pub start: String,
}

fn one() -> Rational {
    rational(1, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalConfig {
    pub target: StrategySpec,
    #[serde(default)]
    pub adversaries: Vec<StrategySpec>,
    /// Increasing capital milestones as `"num/den"` strings.
    pub milestones: Vec<String>,
    #[serde(default = "default_stage_cap")]
    pub stage_cap: usize,
}

fn default_stage_cap() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleOrHoldConfig {
    pub positions: PositionRule,
    /// Selection counts are tiny (one per designated position), so these
    /// thresholds are separate from the analysis ones.
    pub burn_in: usize,
    pub min_count: u64,
}

impl Default for DoubleOrHoldConfig {
    fn default() -> Self {
        Self { positions: PositionRule::PowersOfTwo, burn_in: 1, min_count: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub bits: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub csv_dir: Option<PathBuf>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub precision: Option<u32>,
    pub csv_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "config" } else { &path }, e.into_inner())
        })
    }

    /// Reads `path`, or returns the defaults when no file is given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::from_json(&text)
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(h) = o.horizon {
            self.horizon = h;
        }
        if let Some(p) = o.precision {
            self.precision_bits = p;
        }
        if let Some(dir) = &o.csv_dir {
            self.outputs.csv_dir = Some(dir.clone());
        }
    }

    /// Builds every spec, reporting the first failure with its field path.
    pub fn resolve(&self) -> CliResult<Resolved> {
        if !(1..=4096).contains(&self.precision_bits) {
            return Err(CliError::config("precision_bits", "must lie in 1..=4096"));
        }
        let t = &self.thresholds;
        if !t.log2.is_finite() || t.log2 <= 0.0 {
            return Err(CliError::config("thresholds.log2", "must be a positive finite number"));
        }
        if t.tol < rational(0, 1) {
            return Err(CliError::config("thresholds.tol", "must be non-negative"));
        }
        if t.burn_in == 0 {
            return Err(CliError::config("thresholds.burn_in", "must be at least 1"));
        }
        if t.min_count == 0 {
            return Err(CliError::config("thresholds.min_count", "must be at least 1"));
        }
        if let GrowthFunction::Linear { a } = &self.growth {
            if *a <= rational(0, 1) {
                return Err(CliError::config("growth.a", "must be positive"));
            }
        }
        if let RealityPolicy::Fixed { p } = &self.policy {
            if *p < rational(0, 1) || *p > rational(1, 1) {
                return Err(CliError::config("policy.p", "must lie in [0, 1]"));
            }
        }
        if let RealityPolicy::MinCapital { strategy } = &self.policy {
            strategy.build().map_err(|e| CliError::config("policy.strategy", e))?;
        }
        // Forecast at the root catches malformed tables and composites.
        self.system
            .forecast_at(&Situation::empty(), self.precision_bits)
            .map_err(|e| CliError::config("system", e))?;

        let strategies = self
            .strategies
            .iter()
            .enumerate()
            .map(|(k, spec)| {
                let built = spec.build().map_err(|e| CliError::config(&format!("strategies[{k}]"), e))?;
                Ok(NamedStrategy { id: format!("s{k:02}:{}", built.name()), strategy: built })
            })
            .collect::<CliResult<Vec<_>>>()?;

        let selection_specs = self.selections.clone().unwrap_or_else(default_selections);
        let mut selections: Vec<NamedSelection> = Vec::with_capacity(selection_specs.len());
        for (k, spec) in selection_specs.iter().enumerate() {
            let built = spec.build().map_err(|e| CliError::config(&format!("selections[{k}]"), e))?;
            let id = built.name();
            if selections.iter().any(|s| s.id == id) {
                return Err(CliError::config(&format!("selections[{k}]"), format!("duplicate selection {id}")));
            }
            selections.push(NamedSelection { id, selection: built });
        }

        let lambdas = match &self.martingale_estimate {
            None => None,
            Some(m) => {
                let ls = m
                    .lambdas
                    .iter()
                    .enumerate()
                    .map(|(k, l)| {
                        parse_rational(l).map_err(|e| CliError::config(&format!("martingale_estimate.lambdas[{k}]"), e))
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                Some((ls, m.resolution_bits))
            }
        };
        Ok(Resolved { strategies, selections, lambdas })
    }
}

pub fn default_selections() -> Vec<SelectionSpec> {
    vec![SelectionSpec::AllOnes, SelectionSpec::Parity { r: 0, m: 2 }, SelectionSpec::Parity { r: 1, m: 2 }]
}

#[derive(Debug, Clone)]
pub struct NamedStrategy {
    pub id: String,
    pub strategy: Arc<dyn BettingStrategy>,
}

#[derive(Debug, Clone)]
pub struct NamedSelection {
    pub id: String,
    pub selection: Arc<dyn SelectionProcess>,
}

/// Built objects of a validated config.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub strategies: Vec<NamedStrategy>,
    pub selections: Vec<NamedSelection>,
    /// Stakes and resolution for the martingale-side estimate.
    pub lambdas: Option<(Vec<Rational>, u32)>,
}

/// Reads a `.bits` file; failures map to exit code 2.
pub fn read_bits(path: &Path) -> CliResult<Situation> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    parse_bits(&text).map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn errors_name_the_field() {
        let err = ExperimentConfig::from_json(r#"{"thresholds": {"burn_in": "x"}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("thresholds.burn_in"), "{err}");

        let err = ExperimentConfig::from_json(r#"{"strategies": [{"name": "hold"}, {"name": "nope"}]}"#).unwrap_err();
        assert!(err.to_string().contains("strategies[1]"), "{err}");

        let cfg = ExperimentConfig::from_json(
            r#"{"strategies": [{"name": "fractional_exploit", "direction": "up", "interval": ["1/2", "1/2"], "lambda": "2"}]}"#,
        )
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("strategies[0]"), "{err}");
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ExperimentConfig::from_json(r#"{"seed": 1, "horizon": 5}"#).unwrap();
        cfg.apply(&Overrides { seed: Some(9), horizon: None, precision: Some(40), csv_dir: None });
        assert_eq!((cfg.seed, cfg.horizon, cfg.precision_bits), (9, 5, 40));
    }

    #[test]
    fn duplicate_selections_rejected() {
        let cfg = ExperimentConfig::from_json(r#"{"selections": [{"name": "all_ones"}, {"name": "all_ones"}]}"#).unwrap();
        assert!(cfg.resolve().unwrap_err().to_string().contains("duplicate"));
    }
}
