use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{format_rational, parse_rational};
use crate::{Error, Rational, Result, Scalar};

/// A closed subinterval `[lo, hi]` of `[0, 1]`: the forecast for the
/// probability of outcome 1.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalForecast<S> {
    lo: S,
    hi: S,
}

impl<S: Scalar> IntervalForecast<S> {
    pub fn new(lo: S, hi: S) -> Result<Self> {
        if lo.is_negative() || lo > hi || hi > S::one() {
            return Err(Error::InvalidInterval {
                lo: format!("{lo:?}"),
                hi: format!("{hi:?}"),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn precise(p: S) -> Result<Self> {
        Self::new(p.clone(), p)
    }

    pub fn vacuous() -> Self {
        Self { lo: S::zero(), hi: S::one() }
    }

    /// `min I`
    pub fn lo(&self) -> &S {
        &self.lo
    }

    /// `max I`
    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn is_precise(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, p: &S) -> bool {
        &self.lo <= p && p <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn width(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    /// True when the interval lies strictly inside `(0, 1)`.
    pub fn is_interior(&self) -> bool {
        self.lo.is_positive() && self.hi < S::one()
    }
}

impl IntervalForecast<Rational> {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }
}

impl<S: Scalar + std::fmt::Display> std::fmt::Display for IntervalForecast<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// JSON form: `["1/4", "3/4"]`.
impl Serialize for IntervalForecast<Rational> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalForecast<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = parse_rational(&lo).map_err(serde::de::Error::custom)?;
        let hi = parse_rational(&hi).map_err(serde::de::Error::custom)?;
        Self::new(lo, hi).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    #[test]
    fn rejects_invalid_bounds() {
        assert!(IntervalForecast::new(rational(3, 4), rational(1, 4)).is_err());
        assert!(IntervalForecast::new(rational(-1, 4), rational(1, 4)).is_err());
        assert!(IntervalForecast::new(0.2f64, 1.5).is_err());
        assert!(IntervalForecast::new(0.0f64, 1.0).is_ok());
    }

    #[test]
    fn subset_and_interior() {
        let i = IntervalForecast::new(rational(1, 4), rational(3, 4)).unwrap();
        let j = IntervalForecast::precise(rational(1, 2)).unwrap();
        assert!(j.is_subset_of(&i));
        assert!(!i.is_subset_of(&j));
        assert!(i.is_interior());
        assert!(!IntervalForecast::<Rational>::vacuous().is_interior());
        assert_eq!(i.midpoint(), rational(1, 2));
    }

    #[test]
    fn json_uses_fraction_strings() {
        let i = IntervalForecast::new(rational(1, 4), rational(3, 4)).unwrap();
        let text = serde_json::to_string(&i).unwrap();
        assert_eq!(text, r#"["1/4","3/4"]"#);
        let back: IntervalForecast<Rational> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, i);
        assert!(serde_json::from_str::<IntervalForecast<Rational>>(r#"["3/4","1/4"]"#).is_err());
    }
}
