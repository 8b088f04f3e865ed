//! `construct`: greedy capital-bounded paths, diagonalisation, and the
//! double-or-hold pair.

use std::sync::Arc;

use clap::ValueEnum;
use irand_core::constructions::{diagonal_path, double_or_hold_pair, greedy_bounded_path, is_double_or_hold, DiagonalReport};
use irand_core::martingale::{replay, BettingStrategy, CapitalMode, PositionRule};
use irand_core::model::{parse_bits, Situation};
use irand_core::scalar::{parse_rational, serde_f64_ext, serde_rational};
use irand_core::stochasticity::{
    church_statistics, estimate_from, AllOnes, DoublingDetector, SelectionProcess, SelectionSummary,
};
use irand_core::{Rational, FINITE_HORIZON_DISCLAIMER};
use serde::Serialize;

use crate::analyze::EstimateSummary;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Greedy,
    Diagonal,
    DoubleOrHold,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionReport {
    Greedy(GreedyReport),
    Diagonal(DiagonalSummary),
    DoubleOrHold(DoubleOrHoldReport),
}

impl ConstructionReport {
    /// Whether every exactly-checked invariant of the construction held.
    pub fn invariants_held(&self) -> bool {
        match self {
            Self::Greedy(g) => g.bound_held,
            Self::Diagonal(d) => d.report.invariant_held,
            Self::DoubleOrHold(d) => d.structure_held && d.detector_ratio_is_one,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GreedyReport {
    pub strategy: String,
    pub start_len: usize,
    pub horizon: usize,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    #[serde(with = "serde_rational")]
    pub final_capital: Rational,
    #[serde(with = "serde_f64_ext")]
    pub max_log2_capital: f64,
    /// `M(ω_{1:n}) ≤ y` held exactly at every step.
    pub bound_held: bool,
    pub first_violation: Option<usize>,
    pub disclaimer: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalSummary {
    pub target: String,
    pub adversaries: Vec<String>,
    pub path_len: usize,
    #[serde(flatten)]
    pub report: DiagonalReport,
    pub disclaimer: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubleOrHoldReport {
    pub strategy: String,
    pub horizon: usize,
    pub seed: u64,
    pub designated: usize,
    pub detector_selected: u64,
    pub detector_ones: u64,
    pub detector_ratio_is_one: bool,
    #[serde(with = "serde_f64_ext")]
    pub final_log2_capital: f64,
    /// `is_double_or_hold` held at every audited situation.
    pub structure_held: bool,
    pub audited_situations: usize,
    pub selections: Vec<SelectionSummary>,
    pub estimate: Option<EstimateSummary>,
    pub disclaimer: &'static str,
}

pub fn construct(kind: Kind, cfg: &ExperimentConfig) -> CliResult<(Situation, ConstructionReport)> {
    match kind {
        Kind::Greedy => greedy(cfg),
        Kind::Diagonal => diagonal(cfg),
        Kind::DoubleOrHold => double_or_hold(cfg),
    }
}

fn greedy(cfg: &ExperimentConfig) -> CliResult<(Situation, ConstructionReport)> {
    let g = cfg.construct.greedy.as_ref().ok_or_else(|| CliError::config("construct.greedy", "missing"))?;
    let strategy = g.strategy.build().map_err(|e| CliError::config("construct.greedy.strategy", e))?;
    let start = parse_bits(&g.start).map_err(|e| CliError::config("construct.greedy.start", e))?;
    let path = greedy_bounded_path(strategy.as_ref(), &g.y, &start, cfg.horizon).map_err(|e| match e {
        irand_core::Error::Precondition(_) => CliError::config("construct.greedy", e),
        e => CliError::internal(e),
    })?;
    let report = GreedyReport {
        strategy: strategy.name(),
        start_len: path.start_len,
        horizon: cfg.horizon,
        bound: path.bound.clone(),
        final_capital: path.final_capital.clone(),
        max_log2_capital: path.log2_capital.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        bound_held: path.bound_held,
        first_violation: path.first_violation,
        disclaimer: FINITE_HORIZON_DISCLAIMER,
    };
    Ok((path.path, ConstructionReport::Greedy(report)))
}

fn diagonal(cfg: &ExperimentConfig) -> CliResult<(Situation, ConstructionReport)> {
    let d = cfg.construct.diagonal.as_ref().ok_or_else(|| CliError::config("construct.diagonal", "missing"))?;
    let target = d.target.build().map_err(|e| CliError::config("construct.diagonal.target", e))?;
    let adversaries = d
        .adversaries
        .iter()
        .enumerate()
        .map(|(k, s)| s.build().map_err(|e| CliError::config(&format!("construct.diagonal.adversaries[{k}]"), e)))
        .collect::<CliResult<Vec<Arc<dyn BettingStrategy>>>>()?;
    let milestones = d
        .milestones
        .iter()
        .enumerate()
        .map(|(k, m)| parse_rational(m).map_err(|e| CliError::config(&format!("construct.diagonal.milestones[{k}]"), e)))
        .collect::<CliResult<Vec<_>>>()?;
    let (path, report) = diagonal_path(target.as_ref(), &adversaries, &milestones, d.stage_cap).map_err(|e| match e {
        irand_core::Error::Precondition(_) => CliError::config("construct.diagonal.milestones", e),
        e => CliError::internal(e),
    })?;
    let summary = DiagonalSummary {
        target: target.name(),
        adversaries: adversaries.iter().map(|a| a.name()).collect(),
        path_len: path.len(),
        report,
        disclaimer: FINITE_HORIZON_DISCLAIMER,
    };
    Ok((path, ConstructionReport::Diagonal(summary)))
}

/// Situations at which the double-or-hold structure is re-checked
/// independently: every designated length and its successor, plus a coarse
/// grid. (The detector scan itself already rejects any situation where the
/// strategy neither doubles nor holds.)
fn audit_lengths(positions: &PositionRule, horizon: usize) -> Vec<usize> {
    let stride = (horizon / 16).max(1);
    let mut out: Vec<usize> = (0..=horizon)
        .filter(|&n| n % stride == 0 || positions.is_designated(n) || (n > 0 && positions.is_designated(n - 1)))
        .collect();
    out.dedup();
    out
}

fn double_or_hold(cfg: &ExperimentConfig) -> CliResult<(Situation, ConstructionReport)> {
    let c = &cfg.construct.double_or_hold;
    if cfg.horizon == 0 {
        return Err(CliError::config("horizon", "double_or_hold needs a horizon of at least 1"));
    }
    if c.burn_in == 0 || c.min_count == 0 {
        return Err(CliError::config("construct.double_or_hold", "burn_in and min_count must be at least 1"));
    }
    let (strategy, path) = double_or_hold_pair(c.positions.clone(), cfg.horizon, cfg.seed);
    let detector = DoublingDetector { strategy: strategy.clone() };
    let selections: [&dyn SelectionProcess; 2] = [&AllOnes, &detector];
    let stats = selections
        .iter()
        .map(|sel| church_statistics(&path, &cfg.system, *sel, c.burn_in, cfg.precision_bits))
        .collect::<irand_core::Result<Vec<_>>>()
        .map_err(CliError::internal)?;
    let det = &stats[1];
    let designated = (0..cfg.horizon).filter(|&n| c.positions.is_designated(n)).count();

    let audited = audit_lengths(&c.positions, path.len());
    let mut structure_held = true;
    for &n in &audited {
        if !is_double_or_hold(strategy.as_ref(), &path.prefix(n)).map_err(CliError::internal)? {
            structure_held = false;
            break;
        }
    }
    let final_log2_capital =
        replay(strategy.as_ref(), &path, CapitalMode::Log2, false).map_err(CliError::internal)?.final_log2();
    let estimate = estimate_from(&stats, c.burn_in, c.min_count, cfg.thresholds.surrogate).ok();
    let selections = match &estimate {
        Some(e) => e.breakdown.clone(),
        None => Vec::new(),
    };
    let report = DoubleOrHoldReport {
        strategy: strategy.name(),
        horizon: path.len(),
        seed: cfg.seed,
        designated,
        detector_selected: det.selected_count,
        detector_ones: det.selected_ones,
        detector_ratio_is_one: det.selected_count > 0 && det.selected_ones == det.selected_count,
        final_log2_capital,
        structure_held,
        audited_situations: audited.len(),
        selections,
        estimate: estimate.map(EstimateSummary::from),
        disclaimer: FINITE_HORIZON_DISCLAIMER,
    };
    Ok((path, ConstructionReport::DoubleOrHold(report)))
}
