use serde::Serialize;

use super::cheaper_outcome;
use crate::martingale::{BettingStrategy, CapitalCursor};
use crate::model::Situation;
use crate::scalar::{log2_rational, mul_fast, serde_rational};
use crate::{Error, Rational, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyPath {
    /// `start` followed by the greedy extension.
    pub path: Situation,
    pub start_len: usize,
    #[serde(with = "serde_rational")]
    pub bound: Rational,
    /// Exact capital at the end of the path.
    #[serde(with = "serde_rational")]
    pub final_capital: Rational,
    /// log2 capital at lengths `start_len..=path.len()`.
    #[serde(serialize_with = "crate::scalar::serialize_f64_seq")]
    pub log2_capital: Vec<f64>,
    /// Whether `M(ω_{1:n}) ≤ y` held exactly at every extension step.
    pub bound_held: bool,
    pub first_violation: Option<usize>,
}

/// Extends `start` by `horizon` outcomes, each time taking the outcome with
/// the smaller multiplier (ties to 0). For a strategy with `Ē_{1/2}(D) ≤ 1`
/// that outcome has multiplier at most 1, so capital never rises above its
/// value at `start`.
///
/// Capital is tracked exactly; only the log2 trajectory is kept, because
/// exact capitals along long paths can be very large numbers.
pub fn greedy_bounded_path(
    strategy: &dyn BettingStrategy,
    y: &Rational,
    start: &Situation,
    horizon: usize,
) -> Result<GreedyPath> {
    let mut cursor = CapitalCursor::new(strategy);
    for n in 0..=start.len() {
        let t = cursor.capital(&start.prefix(n))?;
        if t > *y {
            return Err(Error::Precondition(format!("capital {t} exceeds the bound {y} at length {n} of the start")));
        }
    }
    let mut capital = cursor.capital(start)?;
    drop(cursor);

    let mut eval = strategy.evaluator();
    let mut path = start.clone();
    let mut logs = Vec::with_capacity(horizon + 1);
    logs.push(log2_rational(&capital));
    let mut first_violation = None;
    for _ in 0..horizon {
        let d = eval.multiplier(&path)?;
        if !d.is_nonneg() {
            return Err(Error::NotAMultiplier(d.to_string()));
        }
        let x = cheaper_outcome(&d);
        let factor = d.at(x);
        capital = mul_fast(&capital, factor);
        path.push(x);
        if first_violation.is_none() && capital > *y {
            first_violation = Some(path.len());
        }
        logs.push(log2_rational(&capital));
    }
    Ok(GreedyPath {
        path,
        start_len: start.len(),
        bound: y.clone(),
        final_capital: capital,
        log2_capital: logs,
        bound_held: first_violation.is_none(),
        first_violation,
    })
}
