//! Church-type statistics: frequencies of ones among selected outcomes over a finite prefix.
//!
//! Limit inferior and superior of these frequencies are not finitely observable. Three
//! surrogates are recorded for every ratio, all restricted to steps where at
//! least `burn_in` outcomes have been selected:
//!
//! * the final value at the horizon,
//! * running extrema over every step,
//! * tail-window extrema over steps `n ≥ ⌈H/2⌉`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::selection::SelectionProcess;
use crate::model::{ForecastingSystem, Situation};
use crate::scalar::{serde_rational, serde_rational_opt};
use crate::{Error, Interval, Rational, Result, FINITE_HORIZON_DISCLAIMER};

/// Which finite record stands in for `liminf`/`limsup`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surrogate {
    /// Value at the horizon only.
    Final,
    /// Extrema over every step after the burn-in.
    Running,
    /// Extrema over the second half of the horizon, after the burn-in.
    #[default]
    TailWindow,
}

/// Minimum and maximum of a ratio together with the steps attaining them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    #[serde(with = "serde_rational")]
    pub min: Rational,
    pub argmin: usize,
    #[serde(with = "serde_rational")]
    pub max: Rational,
    pub argmax: usize,
}

impl Extrema {
    fn start(v: &Rational, n: usize) -> Self {
        Self { min: v.clone(), argmin: n, max: v.clone(), argmax: n }
    }

    fn observe(&mut self, v: &Rational, n: usize) {
        if *v < self.min {
            self.min = v.clone();
            self.argmin = n;
        }
        if *v > self.max {
            self.max = v.clone();
            self.argmax = n;
        }
    }
}

/// The three surrogates of one ratio sequence.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RatioTrack {
    #[serde(with = "serde_rational_opt")]
    pub final_value: Option<Rational>,
    pub running: Option<Extrema>,
    pub tail: Option<Extrema>,
}

impl RatioTrack {
    fn observe(&mut self, v: &Rational, n: usize, in_tail: bool) {
        match &mut self.running {
            Some(e) => e.observe(v, n),
            None => self.running = Some(Extrema::start(v, n)),
        }
        if in_tail {
            match &mut self.tail {
                Some(e) => e.observe(v, n),
                None => self.tail = Some(Extrema::start(v, n)),
            }
        }
    }

    /// `(min, max)` under the chosen surrogate, if recorded.
    pub fn bounds(&self, surrogate: Surrogate) -> Option<(Rational, Rational)> {
        match surrogate {
            Surrogate::Final => self.final_value.clone().map(|v| (v.clone(), v)),
            Surrogate::Running => self.running.as_ref().map(|e| (e.min.clone(), e.max.clone())),
            Surrogate::TailWindow => self.tail.as_ref().map(|e| (e.min.clone(), e.max.clone())),
        }
    }
}

/// Statistics of one selection process along one prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChurchStatistics {
    pub selection: String,
    pub horizon: usize,
    pub burn_in: usize,
    pub selected_count: u64,
    pub selected_ones: u64,
    /// `false` when the selection never fired; all ratio tracks are then empty.
    pub fires: bool,
    /// Selected-ones frequency `Σ S·ω_{k+1} / Σ S`.
    pub frequency: RatioTrack,
    /// `Σ S·(ω_{k+1} − φ̲(ω_{1:k})) / Σ S`; its lower limit should be ≥ 0.
    pub lower: RatioTrack,
    /// `Σ S·(ω_{k+1} − φ̄(ω_{1:k})) / Σ S`; its upper limit should be ≤ 0.
    pub upper: RatioTrack,
}

/// First step of the tail window for horizon `h`.
pub(crate) fn tail_start(h: usize) -> usize {
    h.div_ceil(2)
}

pub(crate) fn scan(
    prefix: &Situation,
    selection: &dyn SelectionProcess,
    burn_in: usize,
    system: Option<(&ForecastingSystem, u32)>,
) -> Result<ChurchStatistics> {
    if burn_in == 0 {
        return Err(Error::Precondition("burn_in must be at least 1".into()));
    }
    let h = prefix.len();
    let tail = tail_start(h);
    let mut eval = selection.evaluator();
    let mut s = Situation::with_capacity(h);
    let (mut count, mut ones) = (0u64, 0u64);
    let mut sum_lo = Rational::zero();
    let mut sum_hi = Rational::zero();
    let mut freq = RatioTrack::default();
    let mut lower = RatioTrack::default();
    let mut upper = RatioTrack::default();
    let mut current: Option<(Rational, Rational, Rational)> = None;

    for k in 0..h {
        let x = prefix.get(k);
        let fired = eval.select(&s)?;
        if fired {
            count += 1;
            let bit = if x.as_bool() { 1u64 } else { 0 };
            ones += bit;
            let c = Rational::from_integer(BigInt::from(count));
            let f = Rational::new(BigInt::from(ones), BigInt::from(count));
            let (lo_r, hi_r) = if let Some((system, precision)) = system {
                let (lo, hi) = system.forecast_at(&s, precision)?;
                let xv = Rational::from_integer(BigInt::from(bit));
                sum_lo += &xv - lo;
                sum_hi += xv - hi;
                (&sum_lo / &c, &sum_hi / &c)
            } else {
                (Rational::zero(), Rational::zero())
            };
            current = Some((f, lo_r, hi_r));
        }
        s.push(x);
        let n = k + 1;
        if count as usize >= burn_in && (fired || n == tail) {
            if let Some((f, lo_r, hi_r)) = &current {
                let in_tail = n >= tail;
                freq.observe(f, n, in_tail);
                if system.is_some() {
                    lower.observe(lo_r, n, in_tail);
                    upper.observe(hi_r, n, in_tail);
                }
            }
        }
    }
    if let Some((f, lo_r, hi_r)) = current {
        freq.final_value = Some(f);
        if system.is_some() {
            lower.final_value = Some(lo_r);
            upper.final_value = Some(hi_r);
        }
    }
    Ok(ChurchStatistics {
        selection: selection.name(),
        horizon: h,
        burn_in,
        selected_count: count,
        selected_ones: ones,
        fires: count > 0,
        frequency: freq,
        lower,
        upper,
    })
}

/// Definition-7 ratios of `selection` along `prefix` against `system`,
/// using `N`-bit forecast approximations.
pub fn church_statistics(
    prefix: &Situation,
    system: &ForecastingSystem,
    selection: &dyn SelectionProcess,
    burn_in: usize,
    precision_bits: u32,
) -> Result<ChurchStatistics> {
    scan(prefix, selection, burn_in, Some((system, precision_bits)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub selection: String,
    /// `"lower"` or `"upper"`.
    pub bound: String,
    #[serde(with = "serde_rational")]
    pub observed: Rational,
    #[serde(with = "serde_rational")]
    pub limit: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChurchVerdict {
    pub interval: Interval,
    #[serde(with = "serde_rational")]
    pub tol: Rational,
    pub burn_in: usize,
    pub surrogate: Surrogate,
    pub pass: bool,
    pub statistics: Vec<ChurchStatistics>,
    /// Selections that fired fewer than `burn_in` times and were not checked.
    pub skipped: Vec<String>,
    pub violations: Vec<Violation>,
    pub disclaimer: String,
}

/// Checks `min I − tol ≤ selected frequency ≤ max I + tol` for every
/// selection that fired at least `burn_in` times.
pub fn church_verdict(
    prefix: &Situation,
    interval: &Interval,
    selections: &[&dyn SelectionProcess],
    burn_in: usize,
    tol: &Rational,
    surrogate: Surrogate,
) -> Result<ChurchVerdict> {
    if *tol < Rational::zero() {
        return Err(Error::Precondition("tol must be non-negative".into()));
    }
    let stats = selections.iter().map(|sel| scan(prefix, *sel, burn_in, None)).collect::<Result<Vec<_>>>()?;
    Ok(verdict_from(interval, stats, burn_in, tol, surrogate))
}

/// [`church_verdict`] over precomputed statistics.
pub fn verdict_from(
    interval: &Interval,
    statistics: Vec<ChurchStatistics>,
    burn_in: usize,
    tol: &Rational,
    surrogate: Surrogate,
) -> ChurchVerdict {
    let lo_limit = interval.lo() - tol;
    let hi_limit = interval.hi() + tol;
    let mut skipped = Vec::new();
    let mut violations = Vec::new();
    for st in &statistics {
        let bounds = if st.selected_count as usize >= burn_in.max(1) { st.frequency.bounds(surrogate) } else { None };
        let Some((min, max)) = bounds else {
            skipped.push(st.selection.clone());
            continue;
        };
        if min < lo_limit {
            violations.push(Violation {
                selection: st.selection.clone(),
                bound: "lower".into(),
                observed: min,
                limit: lo_limit.clone(),
            });
        }
        if max > hi_limit {
            violations.push(Violation {
                selection: st.selection.clone(),
                bound: "upper".into(),
                observed: max,
                limit: hi_limit.clone(),
            });
        }
    }
    ChurchVerdict {
        interval: interval.clone(),
        tol: tol.clone(),
        burn_in,
        surrogate,
        pass: violations.is_empty(),
        statistics,
        skipped,
        violations,
        disclaimer: FINITE_HORIZON_DISCLAIMER.to_string(),
    }
}

impl ChurchStatistics {
    /// Overall selected-ones frequency, if the selection fired.
    pub fn final_frequency(&self) -> Option<&Rational> {
        self.frequency.final_value.as_ref()
    }

    pub fn is_eligible(&self, min_count: u64) -> bool {
        self.selected_count >= min_count.max(1)
    }
}
