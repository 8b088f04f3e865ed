use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::strategy::{
    BettingStrategy, ConstantStrategy, Declared, DoubleOrHold, Gated, Imitator, OscillationTracker,
    PseudoRandom,
};
use super::{discount_adapt, mixture};
use crate::constructions::rng::SplitMix64;
use crate::expectation::allowable_bound;
use crate::model::{ForecastingSystem, Outcome};
use crate::scalar::serde_rational;
use crate::stochasticity::SelectionSpec;
use crate::{rational, Error, Interval, Rational, RationalGamble, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Bet toward outcome 1.
    Up,
    /// Bet toward outcome 0.
    Down,
}

/// Deterministic bit generators the imitator can simulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Constant { bit: Outcome },
    /// Repeats a `"0110"`-style pattern.
    Periodic { pattern: String },
    /// Top bit of SplitMix64 at counter `k`.
    SplitMix { seed: u64 },
}

impl Generator {
    /// The generated bit `ω_{k+1}`.
    pub fn bit(&self, k: u64) -> Outcome {
        match self {
            Generator::Constant { bit } => *bit,
            Generator::Periodic { pattern } => {
                let b = pattern.as_bytes();
                Outcome::from_bool(b[(k % b.len() as u64) as usize] == b'1')
            }
            Generator::SplitMix { seed } => Outcome::from_bool(SplitMix64::at(*seed, k) >> 63 == 1),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Generator::Periodic { pattern } = self {
            if pattern.is_empty() || !pattern.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::InvalidParameter(format!("bad generator pattern {pattern:?}")));
            }
        }
        Ok(())
    }
}

/// Situation lengths at which a double-or-hold strategy bets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum PositionRule {
    /// Lengths 1, 2, 4, 8, …
    PowersOfTwo,
    /// Lengths `k-1, 2k-1, …`.
    Every { k: usize },
    Explicit { lengths: Vec<usize> },
}

impl PositionRule {
    pub fn is_designated(&self, len: usize) -> bool {
        match self {
            PositionRule::PowersOfTwo => len.is_power_of_two(),
            PositionRule::Every { k } => *k > 0 && (len + 1) % k == 0,
            PositionRule::Explicit { lengths } => lengths.contains(&len),
        }
    }
}

impl Default for PositionRule {
    fn default() -> Self {
        PositionRule::PowersOfTwo
    }
}

/// Serializable description of a registry strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategySpec {
    /// `d = (1, 1)`; declared for `interval` (default `[0, 1]`).
    Hold {
        #[serde(default)]
        interval: Option<Interval>,
    },
    /// `d = (0, 2)` for bit 1, `(2, 0)` for bit 0; declared for `{1/2}`.
    DoubleOn { bit: Outcome },
    /// `d = (0, 1/max I)` for bit 1, `(1/(1 − min I), 0)` for bit 0.
    AllInOn { bit: Outcome, interval: Interval },
    FractionalExploit {
        direction: Direction,
        interval: Interval,
        #[serde(with = "serde_rational")]
        lambda: Rational,
    },
    OscillationTracker {
        system: ForecastingSystem,
        #[serde(with = "serde_rational")]
        lambda: Rational,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    Imitator {
        generator: Generator,
        #[serde(with = "serde_rational")]
        lambda: Rational,
        interval: Interval,
    },
    PseudoRandom {
        seed: u64,
        #[serde(with = "serde_rational")]
        max_stake: Rational,
    },
    DoubleOrHold {
        #[serde(default)]
        positions: PositionRule,
    },
    Gated { strategy: Box<StrategySpec>, selection: SelectionSpec },
    Mixture { components: Vec<StrategySpec> },
    DiscountAdapt {
        strategy: Box<StrategySpec>,
        system: ForecastingSystem,
        #[serde(with = "serde_rational")]
        r_lo: Rational,
        #[serde(with = "serde_rational")]
        r_hi: Rational,
        #[serde(default = "default_precision")]
        precision: u32,
    },
}

fn default_precision() -> u32 {
    32
}

fn check_lambda(lambda: &Rational) -> Result<()> {
    if !lambda.is_positive() || lambda > &Rational::one() {
        return Err(Error::InvalidParameter(format!("λ must lie in (0, 1], got {lambda}")));
    }
    Ok(())
}

/// `d(1) = 1 + λ(1 − max I)/max I`, `d(0) = 1 − λ`.
pub(crate) fn fractional_up(i: &Interval, lambda: &Rational) -> RationalGamble {
    let hi = i.hi();
    let d1 = if hi.is_zero() { Rational::one() } else { Rational::one() + lambda * (Rational::one() - hi) / hi };
    RationalGamble::new(Rational::one() - lambda, d1)
}

/// `d(0) = 1 + λ·min I/(1 − min I)`, `d(1) = 1 − λ`.
pub(crate) fn fractional_down(i: &Interval, lambda: &Rational) -> RationalGamble {
    let lo = i.lo();
    let one = Rational::one();
    let d0 = if lo == &one { one.clone() } else { &one + lambda * lo / (&one - lo) };
    RationalGamble::new(d0, one - lambda)
}

impl StrategySpec {
    pub fn build(&self) -> Result<Arc<dyn BettingStrategy>> {
        let constant = |name: String, d: RationalGamble, i: Interval| -> Arc<dyn BettingStrategy> {
            Arc::new(ConstantStrategy { name, d, declared: Declared::Interval(i) })
        };
        Ok(match self {
            StrategySpec::Hold { interval } => constant(
                "hold".into(),
                RationalGamble::hold(),
                interval.clone().unwrap_or_else(Interval::vacuous),
            ),
            StrategySpec::DoubleOn { bit } => {
                let d = match bit {
                    Outcome::One => RationalGamble::new(Rational::zero(), rational(2, 1)),
                    Outcome::Zero => RationalGamble::new(rational(2, 1), Rational::zero()),
                };
                constant(format!("double_on({})", *bit as u8), d, Interval::precise(rational(1, 2))?)
            }
            StrategySpec::AllInOn { bit, interval } => {
                allowable_bound(interval)?;
                let one = Rational::one();
                let d = match bit {
                    Outcome::One => RationalGamble::new(Rational::zero(), &one / interval.hi()),
                    Outcome::Zero => RationalGamble::new(&one / (&one - interval.lo()), Rational::zero()),
                };
                constant(format!("all_in_on({},{interval})", *bit as u8), d, interval.clone())
            }
            StrategySpec::FractionalExploit { direction, interval, lambda } => {
                check_lambda(lambda)?;
                allowable_bound(interval)?;
                let d = match direction {
                    Direction::Up => fractional_up(interval, lambda),
                    Direction::Down => fractional_down(interval, lambda),
                };
                let dir = if *direction == Direction::Up { "up" } else { "down" };
                constant(format!("fractional_exploit({dir},{interval},{lambda})"), d, interval.clone())
            }
            StrategySpec::OscillationTracker { system, lambda, precision } => {
                check_lambda(lambda)?;
                if *precision == 0 {
                    return Err(Error::InvalidParameter("precision must be at least 1".into()));
                }
                Arc::new(OscillationTracker {
                    system: system.clone(),
                    lambda: lambda.clone(),
                    precision: *precision,
                    declared: Declared::half(),
                })
            }
            StrategySpec::Imitator { generator, lambda, interval } => {
                check_lambda(lambda)?;
                generator.validate()?;
                if !interval.is_interior() {
                    return Err(Error::InvalidParameter("imitator needs an interval inside (0, 1)".into()));
                }
                Arc::new(Imitator::new(generator.clone(), lambda.clone(), interval.clone()))
            }
            StrategySpec::PseudoRandom { seed, max_stake } => {
                if max_stake.is_negative() || max_stake > &Rational::one() {
                    return Err(Error::InvalidParameter("max_stake must lie in [0, 1]".into()));
                }
                Arc::new(PseudoRandom { seed: *seed, max_stake: max_stake.clone(), declared: Declared::half() })
            }
            StrategySpec::DoubleOrHold { positions } => Arc::new(DoubleOrHold::new(positions.clone())),
            StrategySpec::Gated { strategy, selection } => {
                Arc::new(Gated { inner: strategy.build()?, selection: selection.build()? })
            }
            StrategySpec::Mixture { components } => {
                let built = components.iter().map(StrategySpec::build).collect::<Result<Vec<_>>>()?;
                Arc::new(mixture(built, components.len())?)
            }
            StrategySpec::DiscountAdapt { strategy, system, r_lo, r_hi, precision } => Arc::new(discount_adapt(
                strategy.build()?,
                system.clone(),
                r_lo.clone(),
                r_hi.clone(),
                *precision,
            )?),
        })
    }
}

/// Looks up a strategy by registry name with JSON parameters, e.g.
/// `strategy_registry("double_on", json!({"bit": 1}))`.
pub fn strategy_registry(name: &str, params: serde_json::Value) -> Result<Arc<dyn BettingStrategy>> {
    const NAMES: &[&str] = &[
        "hold",
        "double_on",
        "all_in_on",
        "fractional_exploit",
        "oscillation_tracker",
        "imitator",
        "pseudo_random",
        "double_or_hold",
        "gated",
        "mixture",
        "discount_adapt",
    ];
    if !NAMES.contains(&name) {
        return Err(Error::UnknownName(name.to_string()));
    }
    let mut obj = match params {
        serde_json::Value::Object(m) => m,
        serde_json::Value::Null => serde_json::Map::new(),
        other => return Err(Error::InvalidParameter(format!("parameters must be an object, got {other}"))),
    };
    obj.insert("name".into(), serde_json::Value::String(name.into()));
    let spec: StrategySpec = serde_json::from_value(serde_json::Value::Object(obj))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectation::upper_expectation;
    use crate::martingale::validate_step;
    use crate::model::Situation;
    use serde_json::json;

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::new(rational(a.0, a.1), rational(b.0, b.1)).unwrap()
    }

    fn d_at_box(s: &Arc<dyn BettingStrategy>) -> RationalGamble {
        s.evaluator().multiplier(&Situation::empty()).unwrap()
    }

    #[test]
    fn fractional_exploit_down_example() {
        let i = iv((45, 100), (55, 100));
        let s = StrategySpec::FractionalExploit { direction: Direction::Down, interval: i.clone(), lambda: rational(1, 2) }
            .build()
            .unwrap();
        let d = d_at_box(&s);
        assert_eq!(d, RationalGamble::new(rational(31, 22), rational(1, 2)));
        assert!(validate_step(&i, &d).unwrap());
        // E at both endpoints
        assert!(d.linear_expectation(i.lo()) <= Rational::one());
        assert!(d.linear_expectation(i.hi()) <= Rational::one());
    }

    #[test]
    fn all_in_on_zero_uses_stake_bound() {
        let i = iv((1, 4), (3, 4));
        let s = strategy_registry("all_in_on", json!({"bit": 0, "interval": ["1/4", "3/4"]})).unwrap();
        assert_eq!(d_at_box(&s), RationalGamble::new(rational(4, 3), Rational::zero()));
        assert_eq!(upper_expectation(&i, &d_at_box(&s)), Rational::one());
    }

    #[test]
    fn hold_has_unit_expectation_everywhere() {
        let s = strategy_registry("hold", serde_json::Value::Null).unwrap();
        let d = d_at_box(&s);
        assert_eq!(d, RationalGamble::hold());
        for i in [iv((0, 1), (1, 1)), iv((1, 3), (1, 2)), iv((1, 1), (1, 1))] {
            assert_eq!(upper_expectation(&i, &d), Rational::one());
        }
    }

    #[test]
    fn unknown_names_and_bad_params_are_errors() {
        assert!(matches!(strategy_registry("martingale", json!({})), Err(Error::UnknownName(_))));
        assert!(strategy_registry(
            "fractional_exploit",
            json!({"direction": "up", "interval": ["1/4", "3/4"], "lambda": "3/2"})
        )
        .is_err());
        assert!(strategy_registry("all_in_on", json!({"bit": 1, "interval": ["0", "0"]})).is_err());
    }

    #[test]
    fn generators() {
        let g = Generator::Periodic { pattern: "011".into() };
        let bits: Vec<u8> = (0..6).map(|k| g.bit(k) as u8).collect();
        assert_eq!(bits, vec![0, 1, 1, 0, 1, 1]);
        assert!(Generator::Periodic { pattern: "01a".into() }.validate().is_err());
    }

    #[test]
    fn powers_of_two_rule() {
        let r = PositionRule::PowersOfTwo;
        let designated: Vec<usize> = (0..20).filter(|&n| r.is_designated(n)).collect();
        assert_eq!(designated, vec![1, 2, 4, 8, 16]);
        assert_eq!((0..(1 << 17)).filter(|&n| r.is_designated(n)).count(), 17);
    }
}
