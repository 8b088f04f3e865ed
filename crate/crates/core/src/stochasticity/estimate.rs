//! Interval estimators: the Church-side estimate over a finite selection
//! family, the forecast envelope `I_φ(ω)`, and a martingale-side surrogate.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::church::{scan, tail_start, ChurchStatistics, Extrema, Surrogate};
use super::selection::SelectionProcess;
use crate::martingale::registry::{fractional_down, fractional_up};
use crate::model::{ForecastingSystem, Situation};
use crate::scalar::{format_rational, serde_rational, serde_rational_opt, to_f64};
use crate::{Error, Interval, Rational, Result, FINITE_HORIZON_DISCLAIMER};

/// Label attached to Church-side estimates.
pub const FINITE_FAMILY_LABEL: &str = "finite-family, finite-horizon lower/upper records";

/// Label attached to the martingale-side estimate.
pub const MARTINGALE_SURROGATE_LABEL: &str =
    "tool-level surrogate: smallest interval no fractional-exploit strategy crosses the threshold on; no theoretical guarantee";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub id: String,
    pub selected_count: u64,
    #[serde(with = "serde_rational_opt")]
    pub final_ratio: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub min_ratio: Option<Rational>,
    #[serde(with = "serde_rational_opt")]
    pub max_ratio: Option<Rational>,
    pub eligible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attained {
    pub lo: String,
    pub hi: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    pub attained_by: Attained,
    pub breakdown: Vec<SelectionSummary>,
    pub burn_in: usize,
    pub min_count: u64,
    pub surrogate: Surrogate,
    pub label: String,
}

impl IntervalEstimate {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lo.clone(), self.hi.clone()).expect("estimate bounds are ordered frequencies")
    }
}

/// `lo_hat` = smallest recorded selected-ones frequency, `hi_hat` = largest,
/// over the selections that fired at least `min_count` times.
pub fn smallest_interval_estimate(
    prefix: &Situation,
    selections: &[&dyn SelectionProcess],
    burn_in: usize,
    min_count: u64,
    surrogate: Surrogate,
) -> Result<IntervalEstimate> {
    let stats = selections.iter().map(|sel| scan(prefix, *sel, burn_in, None)).collect::<Result<Vec<_>>>()?;
    estimate_from(&stats, burn_in, min_count, surrogate)
}

/// [`smallest_interval_estimate`] over precomputed statistics; ties go to
/// the earliest selection in `statistics`.
pub fn estimate_from(
    statistics: &[ChurchStatistics],
    burn_in: usize,
    min_count: u64,
    surrogate: Surrogate,
) -> Result<IntervalEstimate> {
    if min_count == 0 {
        return Err(Error::Precondition("min_count must be at least 1".into()));
    }
    let mut best: Option<(Rational, String, Rational, String)> = None;
    let mut breakdown = Vec::with_capacity(statistics.len());
    for st in statistics {
        let bounds = st.frequency.bounds(surrogate);
        let eligible = st.is_eligible(min_count) && st.selected_count as usize >= burn_in && bounds.is_some();
        if eligible {
            let (min, max) = bounds.clone().expect("checked");
            best = Some(match best {
                None => (min, st.selection.clone(), max, st.selection.clone()),
                Some((lo, lo_by, hi, hi_by)) => {
                    let (lo, lo_by) = if min < lo { (min, st.selection.clone()) } else { (lo, lo_by) };
                    let (hi, hi_by) = if max > hi { (max, st.selection.clone()) } else { (hi, hi_by) };
                    (lo, lo_by, hi, hi_by)
                }
            });
        }
        breakdown.push(SelectionSummary {
            id: st.selection.clone(),
            selected_count: st.selected_count,
            final_ratio: st.frequency.final_value.clone(),
            min_ratio: bounds.as_ref().map(|b| b.0.clone()),
            max_ratio: bounds.map(|b| b.1),
            eligible,
        });
    }
    let (lo, lo_by, hi, hi_by) = best.ok_or(Error::InsufficientCoverage { min_count })?;
    Ok(IntervalEstimate {
        lo,
        hi,
        attained_by: Attained { lo: lo_by, hi: hi_by },
        breakdown,
        burn_in,
        min_count,
        surrogate,
        label: FINITE_FAMILY_LABEL.to_string(),
    })
}

/// Envelope of the forecasts along a prefix: `min φ̲`, `max φ̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IPhiEstimate {
    pub horizon: usize,
    pub precision_bits: u32,
    /// `true` when the system is exact-rational, so the records are exact.
    pub exact: bool,
    /// Over the situations `ω_{1:n}`, `0 ≤ n ≤ H`.
    pub overall: Extrema,
    /// Over `⌈H/2⌉ ≤ n ≤ H`.
    pub tail: Extrema,
    pub disclaimer: String,
}

impl IPhiEstimate {
    pub fn overall_interval(&self) -> Interval {
        Interval::new(self.overall.min.clone(), self.overall.max.clone()).expect("forecast envelope")
    }

    pub fn tail_interval(&self) -> Interval {
        Interval::new(self.tail.min.clone(), self.tail.max.clone()).expect("forecast envelope")
    }
}

pub fn i_phi_estimate(prefix: &Situation, system: &ForecastingSystem, precision_bits: u32) -> Result<IPhiEstimate> {
    if prefix.is_empty() {
        return Err(Error::Precondition("i_phi_estimate needs a horizon of at least 1".into()));
    }
    let h = prefix.len();
    let tail_from = tail_start(h);
    let mut s = Situation::with_capacity(h);
    let mut overall: Option<Extrema> = None;
    let mut tail: Option<Extrema> = None;
    let record = |slot: &mut Option<Extrema>, lo: &Rational, hi: &Rational, n: usize| match slot {
        None => *slot = Some(Extrema { min: lo.clone(), argmin: n, max: hi.clone(), argmax: n }),
        Some(e) => {
            if *lo < e.min {
                e.min = lo.clone();
                e.argmin = n;
            }
            if *hi > e.max {
                e.max = hi.clone();
                e.argmax = n;
            }
        }
    };
    for n in 0..=h {
        let (lo, hi) = system.forecast_at(&s, precision_bits)?;
        record(&mut overall, &lo, &hi, n);
        if n >= tail_from {
            record(&mut tail, &lo, &hi, n);
        }
        if n < h {
            s.push(prefix.get(n));
        }
    }
    Ok(IPhiEstimate {
        horizon: h,
        precision_bits,
        exact: system.is_exact(),
        overall: overall.expect("at least one situation"),
        tail: tail.expect("tail window contains n = H"),
        disclaimer: FINITE_HORIZON_DISCLAIMER.to_string(),
    })
}

/// Martingale-side surrogate for the smallest interval a path looks random
/// for: `lo` is the largest dyadic `a` such that no `fractional_exploit(down,
/// [a, a], λ)` over the given stakes `λ` reaches `threshold_log2`, `hi` the
/// smallest `b` such that no `fractional_exploit(up, [b, b], λ)` does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleEstimate {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    /// Whether `lo ≤ hi`. When `false`, no strategy in the family rejects
    /// any precise forecast in `[hi, lo]`; the smallest surviving intervals
    /// are those singletons.
    pub ordered: bool,
    /// The stakes tried, as `"num/den"` strings.
    pub lambdas: Vec<String>,
    pub threshold_log2: f64,
    pub resolution_bits: u32,
    pub label: String,
}

/// Whether the constant multiplier `(d0, d1)` reaches `threshold` (log2)
/// anywhere along the prefix.
fn crosses(prefix: &Situation, d0: f64, d1: f64, threshold: f64) -> bool {
    let (l0, l1) = (d0.log2(), d1.log2());
    let mut acc = 0.0;
    for x in prefix.iter() {
        acc += if x.as_bool() { l1 } else { l0 };
        if acc >= threshold {
            return true;
        }
    }
    false
}

pub fn martingale_interval_estimate(
    prefix: &Situation,
    lambdas: &[Rational],
    threshold_log2: f64,
    resolution_bits: u32,
) -> Result<MartingaleEstimate> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("at least one stake λ is required".into()));
    }
    for lambda in lambdas {
        if !(*lambda > Rational::zero() && *lambda < Rational::one()) {
            return Err(Error::InvalidParameter(format!("λ must lie in (0, 1), got {lambda}")));
        }
    }
    if !(threshold_log2 > 0.0) {
        return Err(Error::InvalidParameter("threshold_log2 must be positive".into()));
    }
    if resolution_bits == 0 || resolution_bits > 52 {
        return Err(Error::InvalidParameter("resolution_bits must lie in 1..=52".into()));
    }
    let scale = 1u64 << resolution_bits;
    let point = |k: u64| Rational::new(BigInt::from(k), BigInt::from(scale));
    let down_crosses = |k: u64| {
        let a = Interval::precise(point(k)).expect("grid point in [0,1]");
        lambdas.iter().any(|lambda| {
            let d = fractional_down(&a, lambda);
            crosses(prefix, to_f64(&d.at0), to_f64(&d.at1), threshold_log2)
        })
    };
    let up_crosses = |k: u64| {
        let b = Interval::precise(point(k)).expect("grid point in [0,1]");
        lambdas.iter().any(|lambda| {
            let d = fractional_up(&b, lambda);
            crosses(prefix, to_f64(&d.at0), to_f64(&d.at1), threshold_log2)
        })
    };
    // down: crossing is monotone increasing in a on [0, 1), never at a = 0;
    // a = 1 survives exactly when the path has no zeros
    let ones = prefix.count_ones();
    let lo = if ones == prefix.len() {
        Rational::one()
    } else {
        let (mut ok, mut bad) = (0u64, scale);
        while bad - ok > 1 {
            let mid = ok + (bad - ok) / 2;
            if down_crosses(mid) {
                bad = mid;
            } else {
                ok = mid;
            }
        }
        point(ok)
    };
    // up: crossing is monotone decreasing in b on (0, 1], never at b = 1;
    // b = 0 survives exactly when the path has no ones
    let hi = if ones == 0 {
        Rational::zero()
    } else {
        let (mut bad, mut ok) = (0u64, scale);
        while ok - bad > 1 {
            let mid = bad + (ok - bad) / 2;
            if up_crosses(mid) {
                bad = mid;
            } else {
                ok = mid;
            }
        }
        point(ok)
    };
    Ok(MartingaleEstimate {
        ordered: lo <= hi,
        lo,
        hi,
        lambdas: lambdas.iter().map(format_rational).collect(),
        threshold_log2,
        resolution_bits,
        label: MARTINGALE_SURROGATE_LABEL.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;
    use crate::stochasticity::{AllOnes, Parity};

    fn alternating_prefix(pairs: usize) -> Situation {
        Situation::from_str_bits(&"01".repeat(pairs))
    }

    #[test]
    fn alternating_prefix_estimate() {
        let even = Parity { r: 0, m: 2 };
        let odd = Parity { r: 1, m: 2 };
        let est = smallest_interval_estimate(
            &alternating_prefix(5000),
            &[&AllOnes, &even, &odd],
            100,
            100,
            Surrogate::TailWindow,
        )
        .unwrap();
        assert_eq!(est.lo, Rational::zero());
        assert_eq!(est.hi, Rational::one());
        assert_eq!(est.attained_by.lo, "parity(0,2)");
        assert_eq!(est.attained_by.hi, "parity(1,2)");
        assert!(est.breakdown.iter().all(|b| b.eligible));
    }

    #[test]
    fn all_zeros_and_coverage() {
        let zeros = Situation::from_str_bits("0000000000");
        let est = smallest_interval_estimate(&zeros, &[&AllOnes], 1, 1, Surrogate::Running).unwrap();
        assert_eq!((est.lo.clone(), est.hi.clone()), (Rational::zero(), Rational::zero()));
        let err = smallest_interval_estimate(&zeros, &[&AllOnes], 1, 11, Surrogate::Running).unwrap_err();
        assert!(matches!(err, Error::InsufficientCoverage { min_count: 11 }));
    }

    #[test]
    fn i_phi_examples() {
        let alt = ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap();
        let p = Situation::from_str_bits("01");
        let est = i_phi_estimate(&p, &alt, 8).unwrap();
        assert!(est.exact);
        assert_eq!(est.overall_interval(), Interval::new(rational(3, 10), rational(7, 10)).unwrap());
        assert_eq!(est.tail_interval(), est.overall_interval());
        let st = ForecastingSystem::stationary(Interval::new(rational(2, 10), rational(9, 10)).unwrap());
        let est = i_phi_estimate(&Situation::from_str_bits("1"), &st, 8).unwrap();
        assert_eq!(est.overall_interval(), Interval::new(rational(2, 10), rational(9, 10)).unwrap());
        assert!(i_phi_estimate(&Situation::empty(), &st, 8).is_err());
    }

    #[test]
    fn martingale_estimate_brackets_frequency() {
        let p = alternating_prefix(2000);
        let stakes = [rational(1, 2), rational(1, 8), rational(1, 32)];
        let est = martingale_interval_estimate(&p, &stakes, 10.0, 12).unwrap();
        // the threshold needs a margin, so each side stops just past 1/2
        assert!(!est.ordered);
        assert!(est.hi <= rational(1, 2) && rational(1, 2) <= est.lo);
        assert!(est.hi > rational(45, 100) && est.lo < rational(55, 100), "{} {}", est.lo, est.hi);
        let ones = Situation::from_str_bits(&"1".repeat(200));
        let est = martingale_interval_estimate(&ones, &stakes, 10.0, 12).unwrap();
        assert_eq!(est.lo, Rational::one());
        assert!(est.hi > rational(9, 10));
    }
}
