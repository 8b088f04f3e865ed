//! `analyze` and `estimate`: statistics of one path under a config.

use std::path::Path;

use irand_core::martingale::{
    replay, schnorr_verdict, unbounded_verdict, validate_declared, CapitalMode, CapitalTrajectory, SchnorrReport,
    UnboundedReport,
};
use irand_core::model::{ForecastingSystem, Situation};
use irand_core::stochasticity::{
    church_statistics, estimate_from, i_phi_estimate, martingale_interval_estimate, verdict_from, Attained,
    ChurchStatistics, ChurchVerdict, IPhiEstimate, IntervalEstimate, MartingaleEstimate, SelectionSummary, Surrogate,
    FINITE_FAMILY_LABEL, MARTINGALE_SURROGATE_LABEL,
};
use irand_core::scalar::{serde_f64_ext, serde_rational};
use irand_core::{Error, Rational, FINITE_HORIZON_DISCLAIMER};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, NamedSelection, NamedStrategy, Resolved};
use crate::error::{CliError, CliResult};

/// Which parts of the report to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Everything: Church verdict, estimators, strategy verdicts.
    Full,
    /// Estimators only.
    Estimates,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub horizon: usize,
    pub ones: usize,
    /// `true` for an empty path; every statistic is then vacuous.
    pub no_data: bool,
    pub system: String,
    pub precision_bits: u32,
    pub selections: Vec<SelectionSummary>,
    /// `None` when no selection fired `min_count` times.
    pub estimate: Option<EstimateSummary>,
    pub i_phi: Option<IPhiEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub church_verdict: Option<ChurchVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub strategies: Vec<StrategyReport>,
    pub martingale_estimate: Option<MartingaleEstimate>,
    pub disclaimers: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateSummary {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    pub attained_by: Attained,
    pub burn_in: usize,
    pub min_count: u64,
    pub surrogate: Surrogate,
    pub label: String,
}

impl From<IntervalEstimate> for EstimateSummary {
    fn from(e: IntervalEstimate) -> Self {
        Self {
            lo: e.lo,
            hi: e.hi,
            attained_by: e.attained_by,
            burn_in: e.burn_in,
            min_count: e.min_count,
            surrogate: e.surrogate,
            label: e.label,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyReport {
    pub id: String,
    pub capital_mode: CapitalMode,
    pub audit: Audit,
    #[serde(with = "serde_f64_ext")]
    pub final_log2: f64,
    pub unbounded: UnboundedReport,
    pub schnorr: SchnorrReport,
    #[serde(skip)]
    pub trajectory: Option<CapitalTrajectory>,
}

/// Exact validation of the first multipliers of a strategy against its
/// own declaration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub steps: usize,
    pub passed: bool,
    pub first_failure: Option<String>,
}

pub fn audit(named: &NamedStrategy, prefix: &Situation, steps: usize) -> CliResult<Audit> {
    let strategy = named.strategy.as_ref();
    let steps = steps.min(prefix.len());
    let mut eval = strategy.evaluator();
    let mut s = Situation::with_capacity(steps);
    for k in 0..steps {
        let d = eval.multiplier(&s).map_err(CliError::internal)?;
        let (ok, forecast) = match validate_declared(strategy.declared(), &s, &d) {
            Ok(v) => v,
            Err(Error::NotAMultiplier(m)) => {
                return Ok(Audit { steps: k + 1, passed: false, first_failure: Some(format!("negative multiplier {m}")) })
            }
            Err(e) => return Err(CliError::internal(e)),
        };
        if !ok {
            let failure = format!("situation {s}: multiplier {d} under {forecast}");
            return Ok(Audit { steps: k + 1, passed: false, first_failure: Some(failure) });
        }
        s.push(prefix.get(k));
    }
    Ok(Audit { steps, passed: true, first_failure: None })
}

fn strategy_report(
    named: &NamedStrategy,
    prefix: &Situation,
    cfg: &ExperimentConfig,
    keep_trajectory: bool,
) -> CliResult<StrategyReport> {
    let audit = audit(named, prefix, cfg.audit_steps)?;
    let mode = if prefix.len() <= cfg.exact_capital_limit { CapitalMode::Exact } else { CapitalMode::Log2 };
    let trajectory = replay(named.strategy.as_ref(), prefix, mode, false).map_err(CliError::internal)?;
    Ok(StrategyReport {
        id: named.id.clone(),
        capital_mode: mode,
        audit,
        final_log2: trajectory.final_log2(),
        unbounded: unbounded_verdict(&trajectory, cfg.thresholds.log2),
        schnorr: schnorr_verdict(&trajectory, &cfg.growth, cfg.thresholds.burn_in),
        trajectory: keep_trajectory.then_some(trajectory),
    })
}

fn selection_statistics(
    prefix: &Situation,
    system: &ForecastingSystem,
    selections: &[NamedSelection],
    cfg: &ExperimentConfig,
) -> CliResult<Vec<ChurchStatistics>> {
    selections
        .par_iter()
        .map(|sel| {
            church_statistics(prefix, system, sel.selection.as_ref(), cfg.thresholds.burn_in, cfg.precision_bits)
                .map_err(CliError::internal)
        })
        .collect()
}

pub fn analyze(
    prefix: &Situation,
    cfg: &ExperimentConfig,
    resolved: &Resolved,
    scope: Scope,
    keep_trajectories: bool,
) -> CliResult<AnalysisReport> {
    let system = &cfg.system;
    let t = &cfg.thresholds;
    let run_strategies = scope == Scope::Full;
    let (stats, strategies) = rayon::join(
        || selection_statistics(prefix, system, &resolved.selections, cfg),
        || -> CliResult<Vec<StrategyReport>> {
            if !run_strategies {
                return Ok(Vec::new());
            }
            resolved.strategies.par_iter().map(|s| strategy_report(s, prefix, cfg, keep_trajectories)).collect()
        },
    );
    let (stats, strategies) = (stats?, strategies?);

    let i_phi = if prefix.is_empty() {
        None
    } else {
        Some(i_phi_estimate(prefix, system, cfg.precision_bits).map_err(CliError::internal)?)
    };

    let (selections, estimate) = match estimate_from(&stats, t.burn_in, t.min_count, t.surrogate) {
        Ok(e) => (e.breakdown.clone(), Some(e.into())),
        Err(Error::InsufficientCoverage { .. }) => (summaries_without_estimate(&stats, t.surrogate), None),
        Err(e) => return Err(CliError::internal(e)),
    };

    let church = if scope == Scope::Full {
        let interval = match (&cfg.church_interval, &i_phi) {
            (Some(i), _) => i.clone(),
            (None, Some(est)) => est.overall_interval(),
            (None, None) => system.hull_at(&Situation::empty(), cfg.precision_bits).map_err(CliError::internal)?,
        };
        Some(verdict_from(&interval, stats, t.burn_in, &t.tol, t.surrogate))
    } else {
        None
    };

    let martingale = match &resolved.lambdas {
        Some((lambdas, bits)) => {
            Some(martingale_interval_estimate(prefix, lambdas, t.log2, *bits).map_err(|e| CliError::config("martingale_estimate", e))?)
        }
        None => None,
    };

    let mut disclaimers = vec![FINITE_HORIZON_DISCLAIMER.to_string(), FINITE_FAMILY_LABEL.to_string()];
    if martingale.is_some() {
        disclaimers.push(MARTINGALE_SURROGATE_LABEL.to_string());
    }
    if estimate.is_none() {
        disclaimers.push(format!("no selection fired at least {} times: no interval estimate", t.min_count));
    }
    if prefix.is_empty() {
        disclaimers.push("no data: the path is empty".to_string());
    }

    Ok(AnalysisReport {
        horizon: prefix.len(),
        ones: prefix.count_ones(),
        no_data: prefix.is_empty(),
        system: system.name(),
        precision_bits: cfg.precision_bits,
        selections,
        estimate,
        i_phi,
        church_verdict: church,
        strategies,
        martingale_estimate: martingale,
        disclaimers,
        generated_at_unix: None,
    })
}

fn summaries_without_estimate(stats: &[ChurchStatistics], surrogate: Surrogate) -> Vec<SelectionSummary> {
    stats
        .iter()
        .map(|st| {
            let bounds = st.frequency.bounds(surrogate);
            SelectionSummary {
                id: st.selection.clone(),
                selected_count: st.selected_count,
                final_ratio: st.frequency.final_value.clone(),
                min_ratio: bounds.as_ref().map(|b| b.0.clone()),
                max_ratio: bounds.map(|b| b.1),
                eligible: false,
            }
        })
        .collect()
}

/// Writes one `step,log2_capital[,exact_capital]` file per strategy.
pub fn write_trajectories(report: &AnalysisReport, dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::config("csv_dir", format!("{}: {e}", dir.display())))?;
    for s in &report.strategies {
        if let Some(t) = &s.trajectory {
            let file = dir.join(format!("{}.csv", file_stem(&s.id)));
            std::fs::write(&file, t.to_csv())
                .map_err(|e| CliError::config("csv_dir", format!("{}: {e}", file.display())))?;
        }
    }
    Ok(())
}

/// Maps a strategy id to a portable file name.
fn file_stem(id: &str) -> String {
    let stem: String = id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    stem.chars().take(80).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_stems_are_portable() {
        assert_eq!(file_stem("s00:fractional_exploit(up,[1/2,1/2],1/2)"), "s00_fractional_exploit_up__1_2_1_2__1_2_");
    }
}
