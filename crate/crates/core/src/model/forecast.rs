use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::reals;
use super::Situation;
use crate::scalar::{clamp_unit, pow2_neg, serde_rational};
use crate::{rational, Error, Interval, Rational, Result};

/// A map from situations to interval forecasts.
///
/// Every system answers approximation queries at a requested precision
/// `N`: the returned bounds lie within `2^-N` of the true lower and upper
/// forecasts. Exact-rational systems return the true values at every `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForecastingSystem {
    /// The same interval in every situation.
    Stationary { interval: Interval },
    /// The same precise forecast `p` in every situation.
    Precise {
        #[serde(with = "serde_rational")]
        p: Rational,
    },
    /// `entries[|s|]` while in range, `default` afterwards.
    TemporalTable { entries: Vec<Interval>, default: Interval },
    /// Precise forecast `even` at even `|s|`, `odd` at odd `|s|`.
    Alternating {
        #[serde(with = "serde_rational")]
        even: Rational,
        #[serde(with = "serde_rational")]
        odd: Rational,
    },
    /// `1/2 + (−1)^{|s|} δ(|s|)`.
    PhiHalf,
    /// `[0, 1]` everywhere.
    Vacuous,
    /// Piecewise in time: segment `i` covers lengths `[until_{i-1}, until_i)`.
    /// Lengths at or beyond the last `until` are outside the domain.
    Composite { segments: Vec<Segment> },
    /// Depends on the last outcome: `initial` at `□`.
    LastBit { initial: Interval, after_zero: Interval, after_one: Interval },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub until: usize,
    pub system: ForecastingSystem,
}

impl ForecastingSystem {
    pub fn stationary(interval: Interval) -> Self {
        Self::Stationary { interval }
    }

    pub fn precise(p: Rational) -> Result<Self> {
        Interval::precise(p.clone())?;
        Ok(Self::Precise { p })
    }

    pub fn alternating(even: Rational, odd: Rational) -> Result<Self> {
        Interval::precise(even.clone())?;
        Interval::precise(odd.clone())?;
        Ok(Self::Alternating { even, odd })
    }

    pub fn name(&self) -> String {
        match self {
            Self::Stationary { interval } => format!("stationary{interval}"),
            Self::Precise { p } => format!("precise({p})"),
            Self::TemporalTable { entries, .. } => format!("temporal_table({} entries)", entries.len()),
            Self::Alternating { even, odd } => format!("alternating({even},{odd})"),
            Self::PhiHalf => "phi_half_oscillating".to_string(),
            Self::Vacuous => "vacuous".to_string(),
            Self::Composite { segments } => format!("composite({} segments)", segments.len()),
            Self::LastBit { .. } => "last_bit".to_string(),
        }
    }

    /// Whether every query returns the exact forecast.
    pub fn is_exact(&self) -> bool {
        match self {
            Self::PhiHalf => false,
            Self::Composite { segments } => segments.iter().all(|g| g.system.is_exact()),
            _ => true,
        }
    }

    /// Whether forecasts depend on a situation only through its length.
    pub fn is_temporal(&self) -> bool {
        match self {
            Self::LastBit { .. } => false,
            Self::Composite { segments } => segments.iter().all(|g| g.system.is_temporal()),
            _ => true,
        }
    }

    pub fn is_stationary(&self) -> bool {
        matches!(self, Self::Stationary { .. } | Self::Precise { .. } | Self::Vacuous)
    }

    pub fn is_precise(&self) -> bool {
        match self {
            Self::Stationary { interval } => interval.is_precise(),
            Self::Precise { .. } | Self::Alternating { .. } | Self::PhiHalf => true,
            Self::TemporalTable { entries, default } => {
                default.is_precise() && entries.iter().all(Interval::is_precise)
            }
            Self::Vacuous => false,
            Self::Composite { segments } => segments.iter().all(|g| g.system.is_precise()),
            Self::LastBit { initial, after_zero, after_one } => {
                initial.is_precise() && after_zero.is_precise() && after_one.is_precise()
            }
        }
    }

    /// Approximation query `(lo_N, hi_N)`, clamped into `[0, 1]` with
    /// `lo_N ≤ hi_N` enforced by collapsing a crossed pair to its midpoint.
    pub fn forecast_at(&self, s: &Situation, precision_bits: u32) -> Result<(Rational, Rational)> {
        if precision_bits == 0 {
            return Err(Error::InvalidParameter("precision_bits must be at least 1".into()));
        }
        let (lo, hi) = self.raw(s, precision_bits)?;
        let (lo, hi) = (clamp_unit(lo), clamp_unit(hi));
        if lo > hi {
            let mid = (lo + hi) / rational(2, 1);
            return Ok((mid.clone(), mid));
        }
        Ok((lo, hi))
    }

    /// [`forecast_at`](Self::forecast_at) packaged as an interval.
    pub fn interval_at(&self, s: &Situation, precision_bits: u32) -> Result<Interval> {
        let (lo, hi) = self.forecast_at(s, precision_bits)?;
        Interval::new(lo, hi)
    }

    /// Conservative interval guaranteed to contain the true forecast:
    /// exact for exact systems, otherwise the `2^-N` hull clamped into `[0, 1]`.
    pub fn hull_at(&self, s: &Situation, precision_bits: u32) -> Result<Interval> {
        let (lo, hi) = self.forecast_at(s, precision_bits)?;
        if self.is_exact() {
            return Interval::new(lo, hi);
        }
        let eps = pow2_neg(precision_bits);
        Interval::new(clamp_unit(lo - &eps), clamp_unit(hi + eps))
    }

    fn raw(&self, s: &Situation, bits: u32) -> Result<(Rational, Rational)> {
        let n = s.len();
        Ok(match self {
            Self::Stationary { interval } => (interval.lo().clone(), interval.hi().clone()),
            Self::Precise { p } => (p.clone(), p.clone()),
            Self::TemporalTable { entries, default } => {
                let i = entries.get(n).unwrap_or(default);
                (i.lo().clone(), i.hi().clone())
            }
            Self::Alternating { even, odd } => {
                let p = if n % 2 == 0 { even } else { odd };
                (p.clone(), p.clone())
            }
            Self::PhiHalf => {
                let d = reals::delta(n as u64, bits + 1);
                let half = rational(1, 2);
                let p = if n % 2 == 0 { half + d } else { half - d };
                (p.clone(), p)
            }
            Self::Vacuous => (Rational::zero(), Rational::one()),
            Self::Composite { segments } => {
                let seg = segments.iter().find(|g| n < g.until).ok_or_else(|| {
                    Error::OutOfDomain { system: self.name(), len: n }
                })?;
                return seg.system.raw(s, bits);
            }
            Self::LastBit { initial, after_zero, after_one } => {
                let i = match s.last() {
                    None => initial,
                    Some(x) if x.as_bool() => after_one,
                    Some(_) => after_zero,
                };
                (i.lo().clone(), i.hi().clone())
            }
        })
    }
}

/// Memoising view of a system at a fixed precision, for sequential passes
/// over one path. Temporal systems are cached by length.
pub struct ForecastView<'a> {
    system: &'a ForecastingSystem,
    precision: u32,
    temporal: bool,
    memo: Vec<Option<Interval>>,
}

impl<'a> ForecastView<'a> {
    pub fn new(system: &'a ForecastingSystem, precision: u32) -> Self {
        Self { system, precision, temporal: system.is_temporal(), memo: Vec::new() }
    }

    pub fn system(&self) -> &'a ForecastingSystem {
        self.system
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn at(&mut self, s: &Situation) -> Result<Interval> {
        if !self.temporal {
            return self.system.interval_at(s, self.precision);
        }
        let n = s.len();
        if let Some(Some(i)) = self.memo.get(n) {
            return Ok(i.clone());
        }
        let i = self.system.interval_at(s, self.precision)?;
        if self.memo.len() <= n {
            self.memo.resize(n + 1, None);
        }
        self.memo[n] = Some(i.clone());
        Ok(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::to_f64;
    use num_traits::Signed;

    fn sit(bits: &str) -> Situation {
        Situation::from_str_bits(bits)
    }

    #[test]
    fn vacuous_is_unit_interval() {
        let (lo, hi) = ForecastingSystem::Vacuous.forecast_at(&sit("0110"), 10).unwrap();
        assert_eq!((lo, hi), (Rational::zero(), Rational::one()));
    }

    #[test]
    fn alternating_odd_length_selects_second_value() {
        let sys = ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap();
        let got = sys.forecast_at(&sit("010"), 4).unwrap();
        assert_eq!(got, (rational(7, 10), rational(7, 10)));
        let got = sys.forecast_at(&sit("01"), 4).unwrap();
        assert_eq!(got, (rational(3, 10), rational(3, 10)));
    }

    #[test]
    fn phi_half_at_box() {
        let (lo, hi) = ForecastingSystem::PhiHalf.forecast_at(&Situation::empty(), 20).unwrap();
        assert_eq!(lo, hi);
        // 1/2 + e^{-1}·sqrt(e − 1), mpmath
        assert!((to_f64(&lo) - 0.982_228_325_521_043_6).abs() < 2f64.powi(-20));
        let (lo1, _) = ForecastingSystem::PhiHalf.forecast_at(&sit("1"), 20).unwrap();
        assert!((to_f64(&lo1) - (0.5 - 0.488_519_414_702_416)).abs() < 2f64.powi(-20));
    }

    #[test]
    fn zero_precision_is_rejected() {
        assert!(ForecastingSystem::Vacuous.forecast_at(&Situation::empty(), 0).is_err());
    }

    #[test]
    fn composite_rejects_lengths_beyond_domain() {
        let sys = ForecastingSystem::Composite {
            segments: vec![
                Segment { until: 2, system: ForecastingSystem::Vacuous },
                Segment { until: 4, system: ForecastingSystem::precise(rational(1, 3)).unwrap() },
            ],
        };
        assert_eq!(sys.forecast_at(&sit("0"), 5).unwrap().0, Rational::zero());
        assert_eq!(sys.forecast_at(&sit("011"), 5).unwrap().0, rational(1, 3));
        assert!(matches!(sys.forecast_at(&sit("0110"), 5), Err(Error::OutOfDomain { len: 4, .. })));
    }

    #[test]
    fn last_bit_is_not_temporal() {
        let i = |a, b| Interval::new(rational(a, 10), rational(b, 10)).unwrap();
        let sys = ForecastingSystem::LastBit { initial: i(5, 5), after_zero: i(1, 2), after_one: i(8, 9) };
        assert!(!sys.is_temporal());
        assert_eq!(sys.forecast_at(&sit("01"), 3).unwrap().0, rational(8, 10));
        assert_eq!(sys.forecast_at(&sit("10"), 3).unwrap().0, rational(1, 10));
    }

    fn builtins() -> Vec<ForecastingSystem> {
        let i = |a, b| Interval::new(rational(a, 10), rational(b, 10)).unwrap();
        vec![
            ForecastingSystem::stationary(i(2, 9)),
            ForecastingSystem::precise(rational(1, 3)).unwrap(),
            ForecastingSystem::TemporalTable { entries: vec![i(1, 2), i(8, 9)], default: i(4, 6) },
            ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap(),
            ForecastingSystem::PhiHalf,
            ForecastingSystem::Vacuous,
            ForecastingSystem::LastBit { initial: i(5, 5), after_zero: i(1, 2), after_one: i(8, 9) },
        ]
    }

    #[test]
    fn approximations_at_two_precisions_are_consistent() {
        for sys in builtins() {
            for bits in ["", "0", "1", "01", "110", "0101", "11111111"] {
                let s = sit(bits);
                for (n1, n2) in [(1u32, 2u32), (3, 9), (10, 30)] {
                    let a = sys.forecast_at(&s, n1).unwrap();
                    let b = sys.forecast_at(&s, n2).unwrap();
                    let tol = pow2_neg(n1) + pow2_neg(n2);
                    assert!((&a.0 - &b.0).abs() < tol, "{} at {s}", sys.name());
                    assert!((&a.1 - &b.1).abs() < tol, "{} at {s}", sys.name());
                    assert!(a.0 <= a.1 && b.0 <= b.1);
                }
            }
        }
    }

    #[test]
    fn temporal_systems_agree_on_equal_lengths() {
        for sys in builtins().into_iter().filter(ForecastingSystem::is_temporal) {
            for bits in [8u32, 20] {
                assert_eq!(sys.forecast_at(&sit("0101"), bits).unwrap(), sys.forecast_at(&sit("1110"), bits).unwrap());
            }
        }
    }

    #[test]
    fn hull_contains_approximation() {
        let s = sit("00");
        let h = ForecastingSystem::PhiHalf.hull_at(&s, 8).unwrap();
        let (lo, hi) = ForecastingSystem::PhiHalf.forecast_at(&s, 30).unwrap();
        assert!(h.contains(&lo) && h.contains(&hi));
    }

    #[test]
    fn view_memoises_temporal_values() {
        let sys = ForecastingSystem::PhiHalf;
        let mut view = ForecastView::new(&sys, 16);
        let a = view.at(&sit("0101")).unwrap();
        let b = view.at(&sit("1111")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_roundtrip() {
        for sys in builtins() {
            let text = serde_json::to_string(&sys).unwrap();
            let back: ForecastingSystem = serde_json::from_str(&text).unwrap();
            assert_eq!(back, sys);
        }
        let sys: ForecastingSystem =
            serde_json::from_str(r#"{"kind":"alternating","even":"3/10","odd":"7/10"}"#).unwrap();
        assert_eq!(sys, ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap());
    }
}
