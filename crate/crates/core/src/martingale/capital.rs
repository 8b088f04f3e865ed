use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::strategy::{BettingStrategy, Declared, MultiplierEval};
use crate::expectation::upper_expectation;
use crate::model::Situation;
use crate::scalar::{format_rational, log2_rational, mul_fast, to_f64};
use crate::{Error, Interval, Rational, RationalGamble, Result};

/// `Ē_I(d) ≤ 1` for a non-negative multiplier `d`.
pub fn validate_step(forecast: &Interval, d: &RationalGamble) -> Result<bool> {
    if !d.is_nonneg() {
        return Err(Error::NotAMultiplier(d.to_string()));
    }
    Ok(upper_expectation(forecast, d) <= Rational::one())
}

/// Checks `d` against whatever `declared` assigns to `s`.
///
/// Non-exact systems are checked against the `2^-N` hull, which can only
/// overstate `Ē`; a failure is retried at `N + 8`, up to `N = 64`. Returns
/// the verdict and the interval it was decided on.
pub fn validate_declared(declared: &Declared, s: &Situation, d: &RationalGamble) -> Result<(bool, Interval)> {
    match declared {
        Declared::Interval(i) => Ok((validate_step(i, d)?, i.clone())),
        Declared::System { system, precision } => {
            let mut n = *precision;
            loop {
                let hull = system.hull_at(s, n)?;
                let ok = validate_step(&hull, d)?;
                if ok || system.is_exact() || n >= 64 {
                    return Ok((ok, hull));
                }
                n = (n + 8).min(64);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapitalMode {
    /// Exact rational capital; no rounding.
    Exact,
    /// `log2` capital in `f64`, for long horizons.
    Log2,
}

/// Capital `T(ω_{1:n})` for `n = 0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub enum CapitalTrajectory {
    Exact(Vec<Rational>),
    Log2(Vec<f64>),
}

impl CapitalTrajectory {
    pub fn len(&self) -> usize {
        match self {
            Self::Exact(v) => v.len(),
            Self::Log2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn horizon(&self) -> usize {
        self.len().saturating_sub(1)
    }

    pub fn mode(&self) -> CapitalMode {
        match self {
            Self::Exact(_) => CapitalMode::Exact,
            Self::Log2(_) => CapitalMode::Log2,
        }
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        match self {
            Self::Exact(v) => Some(v),
            Self::Log2(_) => None,
        }
    }

    pub fn log2_at(&self, n: usize) -> f64 {
        match self {
            Self::Exact(v) => log2_rational(&v[n]),
            Self::Log2(v) => v[n],
        }
    }

    pub fn log2_values(&self) -> Vec<f64> {
        (0..self.len()).map(|n| self.log2_at(n)).collect()
    }

    pub fn final_log2(&self) -> f64 {
        self.log2_at(self.horizon())
    }

    /// CSV with header `step,log2_capital[,exact_capital]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            Self::Exact(v) => {
                out.push_str("step,log2_capital,exact_capital\n");
                for (n, c) in v.iter().enumerate() {
                    out.push_str(&format!("{n},{},{}\n", log2_rational(c), format_rational(c)));
                }
            }
            Self::Log2(v) => {
                out.push_str("step,log2_capital\n");
                for (n, c) in v.iter().enumerate() {
                    out.push_str(&format!("{n},{c}\n"));
                }
            }
        }
        out
    }
}

/// Exact capital at arbitrary situations, reusing the walk from the
/// previously queried situation when the new one shares a prefix with it.
pub struct CapitalCursor<'a> {
    eval: Box<dyn MultiplierEval + 'a>,
    path: Situation,
    capitals: Vec<Rational>,
}

impl<'a> CapitalCursor<'a> {
    pub fn new(strategy: &'a dyn BettingStrategy) -> Self {
        Self { eval: strategy.evaluator(), path: Situation::empty(), capitals: vec![Rational::one()] }
    }

    /// `T(s)`
    pub fn capital(&mut self, s: &Situation) -> Result<Rational> {
        let keep = if s.len() >= self.path.len() && self.path.is_prefix_of(s) {
            self.path.len()
        } else {
            self.path.common_prefix_len(s)
        };
        self.path.truncate(keep);
        self.capitals.truncate(keep + 1);
        for k in keep..s.len() {
            let d = self.eval.multiplier(&self.path)?;
            if !d.is_nonneg() {
                return Err(Error::NotAMultiplier(d.to_string()));
            }
            let x = s.get(k);
            let next = mul_fast(&self.capitals[k], d.at(x));
            self.capitals.push(next);
            self.path.push(x);
        }
        Ok(self.capitals[s.len()].clone())
    }

    /// `D(s)`
    pub fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble> {
        self.eval.multiplier(s)
    }

    /// `(T(s), D(s))`
    pub fn capital_and_multiplier(&mut self, s: &Situation) -> Result<(Rational, RationalGamble)> {
        let t = self.capital(s)?;
        Ok((t, self.eval.multiplier(s)?))
    }
}

/// Generates `T(ω_{1:n})` along `prefix`. With `check`, every multiplier is
/// validated against the strategy's declaration before it is applied.
pub fn replay(
    strategy: &dyn BettingStrategy,
    prefix: &Situation,
    mode: CapitalMode,
    check: bool,
) -> Result<CapitalTrajectory> {
    let mut eval = strategy.evaluator();
    let mut s = Situation::with_capacity(prefix.len());
    let mut exact = Vec::new();
    let mut logs = Vec::new();
    match mode {
        CapitalMode::Exact => exact.push(Rational::one()),
        CapitalMode::Log2 => logs.push(0.0),
    }
    for x in prefix.iter() {
        let d = eval.multiplier(&s)?;
        if !d.is_nonneg() {
            return Err(Error::NotAMultiplier(d.to_string()));
        }
        if check {
            let (ok, forecast) = validate_declared(strategy.declared(), &s, &d)?;
            if !ok {
                return Err(Error::CheckFailed {
                    situation: s.clone(),
                    inequality: format!(
                        "upper expectation of {d} under {forecast} is {} > 1",
                        upper_expectation(&forecast, &d)
                    ),
                });
            }
        }
        let factor = d.at(x);
        match mode {
            CapitalMode::Exact => {
                let next = mul_fast(exact.last().expect("non-empty"), factor);
                exact.push(next);
            }
            CapitalMode::Log2 => {
                let last = *logs.last().expect("non-empty");
                let step = if factor.is_zero() { f64::NEG_INFINITY } else { to_f64(factor).log2() };
                logs.push(last + step);
            }
        }
        s.push(x);
    }
    Ok(match mode {
        CapitalMode::Exact => CapitalTrajectory::Exact(exact),
        CapitalMode::Log2 => CapitalTrajectory::Log2(logs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::StrategySpec;
    use crate::model::{ForecastingSystem, Outcome};
    use crate::rational;

    fn half() -> Interval {
        Interval::precise(rational(1, 2)).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    #[test]
    fn validate_step_examples() {
        assert!(validate_step(&half(), &RationalGamble::new(r(0, 1), r(2, 1))).unwrap());
        assert!(validate_step(&half(), &RationalGamble::hold()).unwrap());
        let i = Interval::new(r(1, 4), r(3, 4)).unwrap();
        assert!(!validate_step(&i, &RationalGamble::new(r(0, 1), r(3, 2))).unwrap());
        assert!(matches!(
            validate_step(&i, &RationalGamble::new(r(-1, 1), r(1, 1))),
            Err(Error::NotAMultiplier(_))
        ));
    }

    #[test]
    fn replay_examples() {
        let hold = StrategySpec::Hold { interval: None }.build().unwrap();
        let t = replay(hold.as_ref(), &Situation::from_str_bits("010011"), CapitalMode::Exact, true).unwrap();
        assert_eq!(t.exact().unwrap(), vec![r(1, 1); 7].as_slice());

        let dbl = StrategySpec::DoubleOn { bit: Outcome::One }.build().unwrap();
        let t = replay(dbl.as_ref(), &Situation::from_str_bits("101"), CapitalMode::Exact, true).unwrap();
        assert_eq!(t.exact().unwrap(), &[r(1, 1), r(2, 1), r(0, 1), r(0, 1)]);

        let all_in = StrategySpec::AllInOn { bit: Outcome::Zero, interval: Interval::new(r(1, 4), r(3, 4)).unwrap() }
            .build()
            .unwrap();
        let t = replay(all_in.as_ref(), &Situation::from_str_bits("000"), CapitalMode::Exact, true).unwrap();
        assert_eq!(t.exact().unwrap(), &[r(1, 1), r(4, 3), r(16, 9), r(64, 27)]);
        let l = replay(all_in.as_ref(), &Situation::from_str_bits("000"), CapitalMode::Log2, false).unwrap();
        assert!((l.final_log2() - (64.0f64 / 27.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn replay_check_names_offending_situation() {
        // Declared for {1/2} but checked against nothing wider: a strategy
        // claiming [1/4, 3/4] while betting (0, 3/2).
        let bad = super::super::ConstantStrategy {
            name: "bad".into(),
            d: RationalGamble::new(r(0, 1), r(3, 2)),
            declared: Declared::Interval(Interval::new(r(1, 4), r(3, 4)).unwrap()),
        };
        let err = replay(&bad, &Situation::from_str_bits("11"), CapitalMode::Exact, true).unwrap_err();
        match err {
            Error::CheckFailed { situation, inequality } => {
                assert!(situation.is_empty());
                assert!(inequality.contains("9/8"), "{inequality}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn system_declaration_uses_hull() {
        let declared = Declared::System { system: ForecastingSystem::PhiHalf, precision: 8 };
        let (ok, _) = validate_declared(&declared, &Situation::empty(), &RationalGamble::hold()).unwrap();
        assert!(ok);
        let (ok, _) =
            validate_declared(&declared, &Situation::empty(), &RationalGamble::new(r(0, 1), r(2, 1))).unwrap();
        assert!(!ok);
    }

    #[test]
    fn cursor_matches_replay_off_path() {
        let s = StrategySpec::PseudoRandom { seed: 3, max_stake: r(1, 2) }.build().unwrap();
        let mut cur = CapitalCursor::new(s.as_ref());
        for bits in ["0110", "01101", "0111", "", "1", "011010"] {
            let sit = Situation::from_str_bits(bits);
            let want = replay(s.as_ref(), &sit, CapitalMode::Exact, false).unwrap();
            assert_eq!(&cur.capital(&sit).unwrap(), want.exact().unwrap().last().unwrap());
        }
    }

    #[test]
    fn csv_header() {
        let t = CapitalTrajectory::Exact(vec![r(1, 1), r(2, 1)]);
        assert_eq!(t.to_csv(), "step,log2_capital,exact_capital\n0,0,1/1\n1,1,2/1\n");
        let t = CapitalTrajectory::Log2(vec![0.0, 1.5]);
        assert_eq!(t.to_csv(), "step,log2_capital\n0,0\n1,1.5\n");
    }
}
