use std::sync::Arc;

use num_traits::One;

use super::strategy::{BettingStrategy, Declared, MultiplierEval};
use crate::expectation::allowable_bound;
use crate::model::{ForecastingSystem, Situation};
use crate::scalar::{clamp_unit, pow2_neg};
use crate::{Error, Interval, Rational, RationalGamble, Result};

/// Carries a test supermartingale for a fixed interval `I` over to a
/// forecasting system: wherever the `N`-bit forecast leaves the band
/// `[r_lo, r_hi]`, the multiplier is divided by `K = allowable_bound(I)`.
///
/// Inside the band `φ(s) ⊆ I`, so `Ē_{φ(s)}(D) ≤ Ē_I(D) ≤ 1`. Outside it
/// `D/K ≤ 1` pointwise, so `Ē_{φ(s)}(D/K) ≤ 1` by boundedness.
#[derive(Debug, Clone)]
pub struct DiscountAdapted {
    inner: Arc<dyn BettingStrategy>,
    system: ForecastingSystem,
    r_lo: Rational,
    r_hi: Rational,
    precision: u32,
    discount: Rational,
    declared: Declared,
}

impl DiscountAdapted {
    /// `S'(s)`: whether the `N`-bit forecast at `s` leaves the band.
    pub fn leaves_band(&self, s: &Situation) -> Result<bool> {
        let (lo, hi) = self.system.forecast_at(s, self.precision)?;
        Ok(lo < self.r_lo || self.r_hi < hi)
    }

    /// `1/K`
    pub fn discount(&self) -> &Rational {
        &self.discount
    }

    /// `S*(s)`: number of strict prefixes of `s` at which the band is left.
    pub fn exits_before(&self, s: &Situation) -> Result<usize> {
        let mut count = 0;
        for k in 0..s.len() {
            if self.leaves_band(&s.prefix(k))? {
                count += 1;
            }
        }
        Ok(count)
    }
}

pub fn discount_adapt(
    strategy: Arc<dyn BettingStrategy>,
    system: ForecastingSystem,
    r_lo: Rational,
    r_hi: Rational,
    precision_bits: u32,
) -> Result<DiscountAdapted> {
    let interval = strategy.declared().interval().cloned().ok_or_else(|| {
        Error::InvalidParameter(format!("{} must be declared for a fixed interval", strategy.name()))
    })?;
    if precision_bits == 0 {
        return Err(Error::InvalidParameter("precision_bits must be at least 1".into()));
    }
    // exact systems answer without approximation error, so the band itself
    // must fit; approximate systems need the 2^-N margin
    let eps = if system.is_exact() { Rational::from_integer(0.into()) } else { pow2_neg(precision_bits) };
    let widened_lo = clamp_unit(&r_lo - &eps);
    let widened_hi = clamp_unit(&r_hi + &eps);
    let band_ok = r_lo <= r_hi
        && Interval::new(widened_lo.clone(), widened_hi.clone())
            .map(|band| band.is_subset_of(&interval))
            .unwrap_or(false);
    if !band_ok {
        return Err(Error::BandExceedsInterval(format!(
            "[{widened_lo}, {widened_hi}] is not inside {interval}"
        )));
    }
    let k = allowable_bound(&interval)?;
    Ok(DiscountAdapted {
        inner: strategy,
        declared: Declared::System { system: system.clone(), precision: precision_bits },
        system,
        r_lo,
        r_hi,
        precision: precision_bits,
        discount: Rational::one() / k,
    })
}

struct AdaptEval<'a> {
    owner: &'a DiscountAdapted,
    inner: Box<dyn MultiplierEval + 'a>,
}

impl MultiplierEval for AdaptEval<'_> {
    fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble> {
        let d = self.inner.multiplier(s)?;
        Ok(if self.owner.leaves_band(s)? { d.scale(&self.owner.discount) } else { d })
    }
}

impl BettingStrategy for DiscountAdapted {
    fn name(&self) -> String {
        format!("discount_adapt({},[{}, {}],{})", self.inner.name(), self.r_lo, self.r_hi, self.precision)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn evaluator(&self) -> Box<dyn MultiplierEval + '_> {
        Box::new(AdaptEval { owner: self, inner: self.inner.evaluator() })
    }
}
