//! Upper and lower expectations of binary gambles under interval forecasts.
//!
//! For a binary outcome the linear expectation `E_p(f) = p·f(1) + (1−p)·f(0)`
//! is affine in `p`, so the upper expectation over `I` is attained at one of
//! its endpoints: `min I` when `f(1) ≤ f(0)`, `max I` otherwise. Everything
//! here is exact for exact scalars; there are no tolerances.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::model::{IntervalForecast, Outcome};
use crate::scalar::{format_rational, parse_rational};
use crate::{Error, Rational, Result, Scalar};

/// A payoff `f: {0,1} → S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gamble<S> {
    pub at0: S,
    pub at1: S,
}

impl<S: Scalar> Gamble<S> {
    pub fn new(at0: S, at1: S) -> Self {
        Self { at0, at1 }
    }

    pub fn zero() -> Self {
        Self::constant(S::zero())
    }

    pub fn constant(c: S) -> Self {
        Self { at0: c.clone(), at1: c }
    }

    /// The multiplier `(1, 1)` of a bettor who keeps their capital.
    pub fn hold() -> Self {
        Self::constant(S::one())
    }

    pub fn at(&self, x: Outcome) -> &S {
        match x {
            Outcome::Zero => &self.at0,
            Outcome::One => &self.at1,
        }
    }

    pub fn negate(&self) -> Self {
        Self { at0: -self.at0.clone(), at1: -self.at1.clone() }
    }

    pub fn scale(&self, lambda: &S) -> Self {
        Self { at0: self.at0.clone() * lambda.clone(), at1: self.at1.clone() * lambda.clone() }
    }

    pub fn shift(&self, mu: &S) -> Self {
        Self { at0: self.at0.clone() + mu.clone(), at1: self.at1.clone() + mu.clone() }
    }

    /// Pointwise `max{0, f}`.
    pub fn positive_part(&self) -> Self {
        Self {
            at0: S::max_of(S::zero(), self.at0.clone()),
            at1: S::max_of(S::zero(), self.at1.clone()),
        }
    }

    pub fn min_value(&self) -> S {
        S::min_of(self.at0.clone(), self.at1.clone())
    }

    pub fn max_value(&self) -> S {
        S::max_of(self.at0.clone(), self.at1.clone())
    }

    pub fn is_nonneg(&self) -> bool {
        !self.at0.is_negative() && !self.at1.is_negative()
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        self.at0 <= other.at0 && self.at1 <= other.at1
    }

    /// `E_p(f)` for a precise probability `p` of outcome 1.
    pub fn linear_expectation(&self, p: &S) -> S {
        p.clone() * self.at1.clone() + (S::one() - p.clone()) * self.at0.clone()
    }
}

impl<S: Scalar> Add for Gamble<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self { at0: self.at0 + rhs.at0, at1: self.at1 + rhs.at1 }
    }
}

impl<S: Scalar> Mul for Gamble<S> {
    type Output = Self;

    /// Pointwise product.
    fn mul(self, rhs: Self) -> Self {
        Self { at0: self.at0 * rhs.at0, at1: self.at1 * rhs.at1 }
    }
}

impl Gamble<Rational> {
    pub fn to_f64(&self) -> Gamble<f64> {
        Gamble::new(crate::scalar::to_f64(&self.at0), crate::scalar::to_f64(&self.at1))
    }
}

impl std::fmt::Display for Gamble<Rational> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.at0, self.at1)
    }
}

impl Serialize for Gamble<Rational> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        [format_rational(&self.at0), format_rational(&self.at1)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gamble<Rational> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        Ok(Self::new(
            parse_rational(&a).map_err(serde::de::Error::custom)?,
            parse_rational(&b).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// `Ē_I(f) = max_{p ∈ I} E_p(f)`.
pub fn upper_expectation<S: Scalar>(forecast: &IntervalForecast<S>, f: &Gamble<S>) -> S {
    if f.at1 <= f.at0 {
        f.linear_expectation(forecast.lo())
    } else {
        f.linear_expectation(forecast.hi())
    }
}

/// `E̲_I(f) = −Ē_I(−f)`.
pub fn lower_expectation<S: Scalar>(forecast: &IntervalForecast<S>, f: &Gamble<S>) -> S {
    -upper_expectation(forecast, &f.negate())
}

/// A gamble is allowable when its upper expectation is non-positive.
pub fn is_allowable<S: Scalar>(forecast: &IntervalForecast<S>, f: &Gamble<S>) -> bool {
    !upper_expectation(forecast, f).is_positive()
}

/// `K = max(1/max I, 1/(1 − min I))`: every non-negative gamble with
/// `Ē_I(f) ≤ 1` satisfies `f ≤ K` pointwise.
pub fn allowable_bound<S: Scalar>(forecast: &IntervalForecast<S>) -> Result<S> {
    let (lo, hi) = (forecast.lo(), forecast.hi());
    if hi.is_zero() || lo == &S::one() {
        return Err(Error::UnboundedPayoff { lo: format!("{lo:?}"), hi: format!("{hi:?}") });
    }
    let up = S::one() / hi.clone();
    let down = S::one() / (S::one() - lo.clone());
    Ok(S::max_of(up, down))
}

/// One stage of the safeguard recursion: accept `max{0, candidate}` when its
/// upper expectation is at most 1, otherwise keep `previous`.
pub fn clip_step<S: Scalar>(forecast: &IntervalForecast<S>, candidate: &Gamble<S>, previous: &Gamble<S>) -> Gamble<S> {
    let clipped = candidate.positive_part();
    if upper_expectation(forecast, &clipped) <= S::one() {
        clipped
    } else {
        previous.clone()
    }
}
