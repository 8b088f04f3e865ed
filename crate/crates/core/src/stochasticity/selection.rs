use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::martingale::{BettingStrategy, CapitalCursor, StrategySpec};
use crate::model::{ForecastingSystem, Outcome, Situation};
use crate::scalar::serde_rational;
use crate::{rational, Error, Rational, RationalGamble, Result};

/// Per-pass evaluator of a selection process.
pub trait SelectionEval {
    fn select(&mut self, s: &Situation) -> Result<bool>;
}

pub trait SelectionProcess: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn is_temporal(&self) -> bool;
    fn evaluator(&self) -> Box<dyn SelectionEval + '_>;
}

/// Selections that are a pure function of the situation.
pub trait PureSelection: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn is_temporal(&self) -> bool;
    fn select_at(&self, s: &Situation) -> Result<bool>;
}

struct PureEval<'a, T: ?Sized>(&'a T);

impl<T: PureSelection + ?Sized> SelectionEval for PureEval<'_, T> {
    fn select(&mut self, s: &Situation) -> Result<bool> {
        self.0.select_at(s)
    }
}

impl<T: PureSelection> SelectionProcess for T {
    fn name(&self) -> String {
        PureSelection::name(self)
    }

    fn is_temporal(&self) -> bool {
        PureSelection::is_temporal(self)
    }

    fn evaluator(&self) -> Box<dyn SelectionEval + '_> {
        Box::new(PureEval(self))
    }
}

/// `S ≡ 1`
#[derive(Debug, Clone, Copy)]
pub struct AllOnes;

impl PureSelection for AllOnes {
    fn name(&self) -> String {
        "all_ones".into()
    }

    fn is_temporal(&self) -> bool {
        true
    }

    fn select_at(&self, _: &Situation) -> Result<bool> {
        Ok(true)
    }
}

/// `S ≡ 0`
#[derive(Debug, Clone, Copy)]
pub struct Never;

impl PureSelection for Never {
    fn name(&self) -> String {
        "never".into()
    }

    fn is_temporal(&self) -> bool {
        true
    }

    fn select_at(&self, _: &Situation) -> Result<bool> {
        Ok(false)
    }
}

/// `S(s) = 1` iff `|s| ≡ r (mod m)`.
#[derive(Debug, Clone, Copy)]
pub struct Parity {
    pub r: usize,
    pub m: usize,
}

impl PureSelection for Parity {
    fn name(&self) -> String {
        format!("parity({},{})", self.r, self.m)
    }

    fn is_temporal(&self) -> bool {
        true
    }

    fn select_at(&self, s: &Situation) -> Result<bool> {
        Ok(s.len() % self.m == self.r)
    }
}

/// Selects every `k`-th outcome: `ω_k, ω_{2k}, …`.
#[derive(Debug, Clone, Copy)]
pub struct Periodic {
    pub k: usize,
}

impl PureSelection for Periodic {
    fn name(&self) -> String {
        format!("periodic({})", self.k)
    }

    fn is_temporal(&self) -> bool {
        true
    }

    fn select_at(&self, s: &Situation) -> Result<bool> {
        Ok((s.len() + 1) % self.k == 0)
    }
}

/// `S(s) = 1` iff `s` ends with the pattern.
#[derive(Debug, Clone)]
pub struct PatternSuffix {
    pub pattern: Vec<Outcome>,
}

impl PureSelection for PatternSuffix {
    fn name(&self) -> String {
        let p: String = self.pattern.iter().map(|x| if x.as_bool() { '1' } else { '0' }).collect();
        format!("pattern_suffix({p})")
    }

    fn is_temporal(&self) -> bool {
        self.pattern.is_empty()
    }

    fn select_at(&self, s: &Situation) -> Result<bool> {
        Ok(s.ends_with(&self.pattern))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Fires when the upper forecast approximation lies below `r`.
    Below,
    /// Fires when the lower forecast approximation lies above `r`.
    Above,
}

/// Fires when the `N`-bit approximation of `φ̄(s)` is below `r` (or of
/// `φ̲(s)` above `r`).
#[derive(Debug, Clone)]
pub struct ThresholdSelection {
    pub system: ForecastingSystem,
    pub precision: u32,
    pub r: Rational,
    pub side: Side,
}

impl PureSelection for ThresholdSelection {
    fn name(&self) -> String {
        let side = if self.side == Side::Below { "below" } else { "above" };
        format!("threshold({},{},{},{side})", self.system.name(), self.precision, self.r)
    }

    fn is_temporal(&self) -> bool {
        self.system.is_temporal()
    }

    fn select_at(&self, s: &Situation) -> Result<bool> {
        let (lo, hi) = self.system.forecast_at(s, self.precision)?;
        Ok(match self.side {
            Side::Below => hi < self.r,
            Side::Above => lo > self.r,
        })
    }
}

/// Fires where a double-or-hold strategy doubles: `T(s·1) = 2T(s)` and
/// `T(s) > 0`.
#[derive(Debug, Clone)]
pub struct DoublingDetector {
    pub strategy: Arc<dyn BettingStrategy>,
}

fn doubles(d: &RationalGamble) -> bool {
    d.at0.is_zero() && d.at1 == rational(2, 1)
}

fn holds(d: &RationalGamble) -> bool {
    *d == RationalGamble::hold()
}

struct DetectorEval<'a> {
    cursor: CapitalCursor<'a>,
}

impl SelectionEval for DetectorEval<'_> {
    fn select(&mut self, s: &Situation) -> Result<bool> {
        let (t, d) = self.cursor.capital_and_multiplier(s)?;
        if !t.is_positive() {
            return Ok(false);
        }
        if doubles(&d) {
            Ok(true)
        } else if holds(&d) {
            Ok(false)
        } else {
            Err(Error::NotDoubleOrHold(s.clone()))
        }
    }
}

impl SelectionProcess for DoublingDetector {
    fn name(&self) -> String {
        format!("doubling_detector({})", self.strategy.name())
    }

    fn is_temporal(&self) -> bool {
        false
    }

    fn evaluator(&self) -> Box<dyn SelectionEval + '_> {
        Box::new(DetectorEval { cursor: CapitalCursor::new(self.strategy.as_ref()) })
    }
}

/// Whether `T(sx) = 2x·T(s)` for both `x`, or `T(sx) = T(s)` for both `x`.
pub fn is_double_or_hold(strategy: &dyn BettingStrategy, s: &Situation) -> Result<bool> {
    let mut cursor = CapitalCursor::new(strategy);
    let (t, d) = cursor.capital_and_multiplier(s)?;
    Ok(t.is_zero() || doubles(&d) || holds(&d))
}

/// Serializable description of a registry selection process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SelectionSpec {
    AllOnes,
    Never,
    Parity { r: usize, m: usize },
    Periodic { k: usize },
    PatternSuffix { pattern: String },
    ThresholdSelection {
        system: ForecastingSystem,
        #[serde(default = "default_precision")]
        precision: u32,
        #[serde(with = "serde_rational")]
        r: Rational,
        side: Side,
    },
    DoublingDetector { strategy: Box<StrategySpec> },
}

fn default_precision() -> u32 {
    32
}

impl SelectionSpec {
    pub fn build(&self) -> Result<Arc<dyn SelectionProcess>> {
        Ok(match self {
            SelectionSpec::AllOnes => Arc::new(AllOnes),
            SelectionSpec::Never => Arc::new(Never),
            SelectionSpec::Parity { r, m } => {
                if *m == 0 || r >= m {
                    return Err(Error::InvalidParameter(format!("parity needs 0 ≤ r < m, got r={r}, m={m}")));
                }
                Arc::new(Parity { r: *r, m: *m })
            }
            SelectionSpec::Periodic { k } => {
                if *k == 0 {
                    return Err(Error::InvalidParameter("periodic needs k ≥ 1".into()));
                }
                Arc::new(Periodic { k: *k })
            }
            SelectionSpec::PatternSuffix { pattern } => {
                let pattern = crate::model::parse_bits(pattern)?.iter().collect();
                Arc::new(PatternSuffix { pattern })
            }
            SelectionSpec::ThresholdSelection { system, precision, r, side } => {
                if *precision == 0 {
                    return Err(Error::InvalidParameter("precision must be at least 1".into()));
                }
                Arc::new(ThresholdSelection { system: system.clone(), precision: *precision, r: r.clone(), side: *side })
            }
            SelectionSpec::DoublingDetector { strategy } => Arc::new(DoublingDetector { strategy: strategy.build()? }),
        })
    }
}

/// Looks up a selection process by registry name with JSON parameters.
pub fn selection_registry(name: &str, params: serde_json::Value) -> Result<Arc<dyn SelectionProcess>> {
    const NAMES: &[&str] =
        &["all_ones", "never", "parity", "periodic", "pattern_suffix", "threshold_selection", "doubling_detector"];
    if !NAMES.contains(&name) {
        return Err(Error::UnknownName(name.to_string()));
    }
    let mut obj = match params {
        serde_json::Value::Object(m) => m,
        serde_json::Value::Null => serde_json::Map::new(),
        other => return Err(Error::InvalidParameter(format!("parameters must be an object, got {other}"))),
    };
    obj.insert("name".into(), serde_json::Value::String(name.into()));
    let spec: SelectionSpec = serde_json::from_value(serde_json::Value::Object(obj))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{Direction, PositionRule};
    use crate::Interval;
    use serde_json::json;

    fn sit(b: &str) -> Situation {
        Situation::from_str_bits(b)
    }

    #[test]
    fn simple_selections() {
        let all = selection_registry("all_ones", json!({})).unwrap();
        assert!(all.evaluator().select(&sit("0101")).unwrap());
        let par = selection_registry("parity", json!({"r": 0, "m": 2})).unwrap();
        let mut e = par.evaluator();
        assert!(e.select(&sit("0000")).unwrap());
        assert!(!e.select(&sit("000")).unwrap());
        let per = SelectionSpec::Periodic { k: 3 }.build().unwrap();
        let fired: Vec<usize> = (0..9).filter(|&n| per.evaluator().select(&sit(&"0".repeat(n))).unwrap()).collect();
        assert_eq!(fired, vec![2, 5, 8]);
        let suf = SelectionSpec::PatternSuffix { pattern: "01".into() }.build().unwrap();
        assert!(suf.evaluator().select(&sit("1101")).unwrap());
        assert!(!suf.evaluator().select(&sit("1110")).unwrap());
        assert!(selection_registry("nope", json!({})).is_err());
        assert!(SelectionSpec::Parity { r: 2, m: 2 }.build().is_err());
    }

    #[test]
    fn threshold_selection() {
        let sys = ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap();
        let below = SelectionSpec::ThresholdSelection {
            system: sys.clone(),
            precision: 8,
            r: rational(1, 2),
            side: Side::Below,
        }
        .build()
        .unwrap();
        assert!(below.evaluator().select(&sit("")).unwrap());
        assert!(!below.evaluator().select(&sit("1")).unwrap());
        assert!(below.is_temporal());
    }

    #[test]
    fn detector_on_double_or_hold() {
        let strat = StrategySpec::DoubleOrHold { positions: PositionRule::PowersOfTwo }.build().unwrap();
        let det = DoublingDetector { strategy: strat.clone() };
        let mut e = det.evaluator();
        // lengths 1 and 2 are designated; keep T > 0 by playing 1 there
        assert!(!e.select(&sit("")).unwrap());
        assert!(e.select(&sit("0")).unwrap());
        assert!(e.select(&sit("01")).unwrap());
        assert!(!e.select(&sit("011")).unwrap());
        // a 0 at a doubling step zeroes the capital: detector goes quiet
        assert!(!e.select(&sit("00")).unwrap());
        assert!(!e.select(&sit("0010")).unwrap());
        for s in ["", "0", "01", "00", "0110"] {
            assert!(is_double_or_hold(strat.as_ref(), &sit(s)).unwrap());
        }
    }

    #[test]
    fn detector_rejects_other_structures() {
        let half = Interval::precise(rational(1, 2)).unwrap();
        let frac = StrategySpec::FractionalExploit { direction: Direction::Up, interval: half, lambda: rational(1, 2) }
            .build()
            .unwrap();
        assert!(!is_double_or_hold(frac.as_ref(), &Situation::empty()).unwrap());
        let det = DoublingDetector { strategy: frac };
        assert!(matches!(det.evaluator().select(&Situation::empty()), Err(Error::NotDoubleOrHold(_))));
        let hold = StrategySpec::Hold { interval: None }.build().unwrap();
        assert!(is_double_or_hold(hold.as_ref(), &sit("0101")).unwrap());
    }
}
