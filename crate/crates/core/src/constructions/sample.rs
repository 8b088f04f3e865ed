use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::cheaper_outcome;
use super::rng::SplitMix64;
use crate::martingale::StrategySpec;
use crate::model::{ForecastingSystem, Outcome, Situation};
use crate::scalar::serde_rational;
use crate::{rational, Rational, Result};

/// How Reality picks the success probability of the next outcome from the
/// forecast `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RealityPolicy {
    AtLo,
    AtHi,
    AtMid,
    /// `p` clamped into the forecast.
    Fixed {
        #[serde(with = "serde_rational")]
        p: Rational,
    },
    /// Uniform on a `2^-32` grid of the forecast, redrawn every step.
    RandomInInterval,
    /// Deterministic: the outcome on which the strategy's multiplier is
    /// smaller (ties to 0). Ignores the forecast and the seed.
    MinCapital { strategy: StrategySpec },
}

impl RealityPolicy {
    pub fn name(&self) -> String {
        match self {
            Self::AtLo => "at_lo".into(),
            Self::AtHi => "at_hi".into(),
            Self::AtMid => "at_mid".into(),
            Self::Fixed { p } => format!("fixed({p})"),
            Self::RandomInInterval => "random_in_interval".into(),
            Self::MinCapital { .. } => "min_capital".into(),
        }
    }
}

/// Samples `horizon` outcomes: step `k` draws `ω_{k+1} = 1` with the
/// policy's probability chosen from `forecast_at(ω_{1:k}, N)`.
/// Deterministic for fixed inputs and seed.
pub fn sample_path(
    system: &ForecastingSystem,
    policy: &RealityPolicy,
    horizon: usize,
    seed: u64,
    precision_bits: u32,
) -> Result<Situation> {
    let mut s = Situation::with_capacity(horizon);
    if let RealityPolicy::MinCapital { strategy } = policy {
        let strategy = strategy.build()?;
        let mut eval = strategy.evaluator();
        for _ in 0..horizon {
            let d = eval.multiplier(&s)?;
            s.push(cheaper_outcome(&d));
        }
        return Ok(s);
    }
    let mut rng = SplitMix64::new(seed);
    let grid = Rational::from_integer(BigInt::from(1u64 << 32));
    for _ in 0..horizon {
        let (lo, hi) = system.forecast_at(&s, precision_bits)?;
        let p = match policy {
            RealityPolicy::AtLo => lo,
            RealityPolicy::AtHi => hi,
            RealityPolicy::AtMid => {
                if lo == hi {
                    lo
                } else {
                    (lo + hi) / rational(2, 1)
                }
            }
            RealityPolicy::Fixed { p } => {
                if *p < lo {
                    lo
                } else if *p > hi {
                    hi
                } else {
                    p.clone()
                }
            }
            RealityPolicy::RandomInInterval => {
                let u = Rational::from_integer(BigInt::from(rng.next_u64() >> 32)) / &grid;
                if (&hi - &lo).is_zero() {
                    lo
                } else {
                    &lo + (hi - &lo) * u
                }
            }
            RealityPolicy::MinCapital { .. } => unreachable!("handled above"),
        };
        s.push(Outcome::from_bool(rng.bernoulli(&p)));
    }
    Ok(s)
}
