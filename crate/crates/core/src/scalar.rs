//! Scalar abstraction and rational helpers.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::{Error, Rational, Result};

/// Number type the interval/gamble calculus is generic over.
///
/// Implemented for `f64` and for exact rationals ([`Rational`]).
pub trait Scalar: Num + Signed + Clone + PartialOrd + fmt::Debug {
    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl<T: Num + Signed + Clone + PartialOrd + fmt::Debug> Scalar for T {}

/// Builds `num/den` as an exact rational. Panics if `den == 0`.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// Parses `"3/10"`, `"-2"`, or a plain decimal such as `"0.45"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Canonical `"num/den"` rendering (den always present).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// log2 of a non-negative rational, accurate for numerators and
/// denominators far outside the `f64` range. Returns `-inf` for zero.
pub fn log2_rational(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    log2_bigint(r.numer()) - log2_bigint(r.denom())
}

pub(crate) fn log2_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::NAN).log2();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift as usize;
    top.to_f64().unwrap_or(f64::NAN).log2() + shift as f64
}

/// Nearest dyadic rational `k / 2^bits` to `r` (ties away from zero).
pub fn round_dyadic(r: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits as usize;
    let scaled = r * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}

// Exact arithmetic on long capital products.
//
// `num-rational` normalises with binary gcd, which is quadratic in the bit
// length when one operand is huge and the other small or a power of two,
// exactly the shape of a capital `T(s)` multiplied by a one-step factor.
// These helpers strip powers of two first and then take Euclidean steps,
// which makes the common cases linear.

/// `gcd(|x|, |y|)`
pub fn gcd_fast(x: &BigInt, y: &BigInt) -> BigInt {
    if x.is_zero() {
        return y.abs();
    }
    if y.is_zero() {
        return x.abs();
    }
    let (tx, ty) = (x.trailing_zeros().unwrap_or(0), y.trailing_zeros().unwrap_or(0));
    let twos = tx.min(ty);
    let mut a = x.abs() >> tx as usize;
    let mut b = y.abs() >> ty as usize;
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.is_one() {
            a = b;
            break;
        }
        if let (Some(p), Some(q)) = (a.to_u64(), b.to_u64()) {
            a = BigInt::from(num_integer::Integer::gcd(&p, &q));
            break;
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
    a << twos as usize
}

fn normalised(num: BigInt, den: BigInt) -> Rational {
    let g = gcd_fast(&num, &den);
    let (num, den) = if g.is_one() { (num, den) } else { (num / &g, den / g) };
    if den.is_negative() {
        Rational::new_raw(-num, -den)
    } else {
        Rational::new_raw(num, den)
    }
}

/// `a·b`, cross-cancelling before multiplying.
pub fn mul_fast(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    if b.is_one() {
        return a.clone();
    }
    if a.is_one() {
        return b.clone();
    }
    let g1 = gcd_fast(a.numer(), b.denom());
    let g2 = gcd_fast(b.numer(), a.denom());
    let num = (a.numer() / &g1) * (b.numer() / &g2);
    let den = (a.denom() / &g2) * (b.denom() / &g1);
    if den.is_negative() {
        Rational::new_raw(-num, -den)
    } else {
        Rational::new_raw(num, den)
    }
}

/// `a / b` for non-zero `b`.
pub fn div_fast(a: &Rational, b: &Rational) -> Rational {
    mul_fast(a, &b.recip())
}

/// `a + b`
pub fn add_fast(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.denom() == b.denom() {
        return normalised(a.numer() + b.numer(), a.denom().clone());
    }
    normalised(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

/// Serde adapter storing rationals as `"num/den"` strings.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational};
    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// [`serde_rational`] for `Option<Rational>`; `None` is `null`.
pub mod serde_rational_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational};
    use crate::Rational;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Serde adapter for `f64` values that may be infinite (log2 of a zero
/// capital, an overflowed excess): non-finite values become the strings
/// `"inf"`, `"-inf"` and `"nan"` instead of JSON `null`.
pub mod serde_f64_ext {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("expected a number, got {other:?}"))),
            },
        }
    }
}

/// [`serde_f64_ext`] for a sequence; used with `serialize_with`.
pub fn serialize_f64_seq<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;

    #[derive(serde::Serialize)]
    struct Ext(#[serde(with = "serde_f64_ext")] f64);

    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Ext(*x))?;
    }
    seq.end()
}

pub fn is_nonneg<S: Scalar>(x: &S) -> bool {
    !x.is_negative()
}

pub fn clamp_unit(r: Rational) -> Rational {
    if r.is_negative() {
        Rational::zero()
    } else if r > Rational::one() {
        Rational::one()
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_integer() {
        assert_eq!(parse_rational("3/10").unwrap(), rational(3, 10));
        assert_eq!(parse_rational("0.45").unwrap(), rational(9, 20));
        assert_eq!(parse_rational("-0.5").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), from_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn log2_handles_huge_values() {
        let big = Rational::from_integer(BigInt::one() << 5000usize);
        assert!((log2_rational(&big) - 5000.0).abs() < 1e-9);
        assert!((log2_rational(&rational(64, 27)) - (64f64 / 27.0).log2()).abs() < 1e-12);
        assert_eq!(log2_rational(&Rational::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn non_finite_floats_round_trip() {
        #[derive(serde::Serialize, serde::Deserialize)]
        struct W(#[serde(with = "serde_f64_ext")] f64);
        assert_eq!(serde_json::to_string(&W(f64::NEG_INFINITY)).unwrap(), r#""-inf""#);
        assert_eq!(serde_json::to_string(&W(1.5)).unwrap(), "1.5");
        assert_eq!(serde_json::from_str::<W>(r#""inf""#).unwrap().0, f64::INFINITY);
        assert_eq!(serde_json::from_str::<W>("2.0").unwrap().0, 2.0);
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(round_dyadic(&rational(1, 3), 2), rational(1, 4));
        assert_eq!(round_dyadic(&rational(3, 8), 2), rational(1, 2));
    }
}
