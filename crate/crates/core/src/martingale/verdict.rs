//! Finite-horizon surrogates for unboundedness and computable
//! unboundedness of a capital trajectory. Neither decides randomness.

use serde::Serialize;

use super::capital::CapitalTrajectory;
use crate::model::GrowthFunction;
use crate::scalar::{serde_f64_ext, to_f64};
use crate::FINITE_HORIZON_DISCLAIMER;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnboundedReport {
    #[serde(with = "serde_f64_ext")]
    pub max_log2: f64,
    pub argmax: usize,
    pub threshold_log2: f64,
    pub crossed: bool,
    /// First step whose log2 capital reaches the threshold.
    pub first_crossing: Option<usize>,
    pub disclaimer: &'static str,
}

pub fn unbounded_verdict(trajectory: &CapitalTrajectory, threshold_log2: f64) -> UnboundedReport {
    let logs = trajectory.log2_values();
    let (mut max_log2, mut argmax) = (f64::NEG_INFINITY, 0);
    for (n, &v) in logs.iter().enumerate() {
        if v > max_log2 {
            max_log2 = v;
            argmax = n;
        }
    }
    let first_crossing = logs.iter().position(|&v| v >= threshold_log2);
    UnboundedReport {
        max_log2,
        argmax,
        threshold_log2,
        crossed: first_crossing.is_some(),
        first_crossing,
        disclaimer: FINITE_HORIZON_DISCLAIMER,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchnorrReport {
    pub growth: String,
    /// `sup_n (T(ω_{1:n}) − τ(n))` over the whole trajectory.
    #[serde(with = "serde_f64_ext")]
    pub sup_excess: f64,
    pub argsup: usize,
    pub burn_in: usize,
    /// First step of the window the flag is decided on.
    pub window_start: usize,
    /// `T(ω_{1:n}) ≥ τ(n)` for some `n` in the window.
    pub flagged: bool,
    pub flagged_at: Option<usize>,
    pub disclaimer: &'static str,
}

/// `limsup_n [T(ω_{1:n}) − τ(n)] ≥ 0` is approximated by asking whether
/// `T ≥ τ` somewhere in the tail `n ∈ (H/2, H]`, with `n ≥ burn_in`.
pub fn schnorr_verdict(trajectory: &CapitalTrajectory, growth: &GrowthFunction, burn_in: usize) -> SchnorrReport {
    let horizon = trajectory.horizon();
    let (mut sup_excess, mut argsup) = (f64::NEG_INFINITY, 0);
    for n in 0..trajectory.len() {
        let capital = match trajectory {
            CapitalTrajectory::Exact(v) => to_f64(&v[n]),
            CapitalTrajectory::Log2(v) => v[n].exp2(),
        };
        let excess = capital - growth.eval(n as u64);
        if excess > sup_excess {
            sup_excess = excess;
            argsup = n;
        }
    }
    let window_start = (horizon / 2 + 1).max(burn_in);
    let flagged_at = (window_start..=horizon).find(|&n| match trajectory {
        CapitalTrajectory::Exact(v) => growth.is_met_by(n as u64, &v[n]),
        CapitalTrajectory::Log2(v) => growth.is_met_by_log2(n as u64, v[n]),
    });
    SchnorrReport {
        growth: growth.name(),
        sup_excess,
        argsup,
        burn_in,
        window_start,
        flagged: flagged_at.is_some(),
        flagged_at,
        disclaimer: FINITE_HORIZON_DISCLAIMER,
    }
}
