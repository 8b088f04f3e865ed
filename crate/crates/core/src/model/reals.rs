//! Directed-rounding evaluation of the real-valued oscillation amplitude
//! `δ(n) = e^{-1/(n+1)} · sqrt(e^{1/(n+1)} − 1)`.
//!
//! With `v = e^x − 1` and `x = 1/(n+1)` this is `sqrt(v) / (1 + v)`. The
//! series for `v` is summed in fixed point at scale `2^M` with every
//! truncation rounded toward zero, so the partial sum is a lower bound and
//! the accumulated truncation plus tail is bounded by `2K + 4` units in the
//! last place. The square root and the quotient are then rounded outward.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::Rational;

/// Rigorous enclosure `[lo, hi] ∋ δ(n)` with endpoints on the grid `2^-scale_bits`.
pub fn delta_enclosure(n: u64, scale_bits: u32) -> (Rational, Rational) {
    let (lo, hi) = delta_fixed(n, scale_bits);
    let den = BigInt::one() << scale_bits as usize;
    (
        Rational::new(BigInt::from(lo), den.clone()),
        Rational::new(BigInt::from(hi), den),
    )
}

fn delta_fixed(n: u64, m: u32) -> (BigUint, BigUint) {
    let one = BigUint::one() << m as usize;
    let steps = BigUint::from(n) + 1u32;

    // v = Σ_{k≥1} x^k / k!
    let mut term = &one / &steps;
    let mut sum = BigUint::zero();
    let mut k = 1u32;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term = term / (&steps * k);
    }
    let v_lo = sum;
    let v_hi = &v_lo + BigUint::from(2 * k + 4);

    let s_lo = (&v_lo << m as usize).sqrt();
    let s_hi = (&v_hi << m as usize).sqrt() + 1u32;

    let d_lo = (&s_lo << m as usize) / (&one + &v_hi);
    let num = &s_hi << m as usize;
    let den = &one + &v_lo;
    let d_hi = (&num + &den - 1u32) / den;
    (d_lo, d_hi)
}

/// A dyadic rational within `2^-precision_bits` of `δ(n)`, clamped into
/// `(0, 1/2)`.
pub fn delta(n: u64, precision_bits: u32) -> Rational {
    let target = precision_bits.max(1);
    // sqrt amplifies the absolute error of v ≈ 1/(n+1) by about sqrt(n+1)/2.
    let mut scale = target + 8 + (64 - (n + 1).leading_zeros()) / 2 + 4;
    loop {
        let (lo, hi) = delta_fixed(n, scale);
        let width = &hi - &lo;
        // width ≤ 2^{-target-2} in value
        if width.bits() + 2 + u64::from(target) <= u64::from(scale) {
            let mid2 = &lo + &hi; // 2·mid at scale 2^scale
            let out_bits = target + 2;
            let shift = (scale + 1 - out_bits) as usize;
            // round half up onto the 2^-(target+2) grid
            let rounded: BigUint = (mid2 + (BigUint::one() << (shift - 1))) >> shift;
            let r = Rational::new(BigInt::from(rounded), BigInt::one() << out_bits as usize);
            return clamp_open_half(r, target);
        }
        scale += 16;
    }
}

fn clamp_open_half(r: Rational, bits: u32) -> Rational {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if r >= half {
        half - crate::scalar::pow2_neg(bits + 3)
    } else if r <= Rational::zero() {
        crate::scalar::pow2_neg(bits + 3)
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{pow2_neg, to_f64};
    use num_traits::Signed;

    // Independent oracle: e^x by exact rational Taylor partial sums with the
    // Lagrange remainder bound, sqrt by rational bisection, and the product
    // form e^{-x}·sqrt(e^x − 1) rather than the quotient form.
    fn exp_bounds(x: &Rational, terms: u32) -> (Rational, Rational) {
        let mut sum = Rational::zero();
        let mut term = Rational::one();
        for k in 0..terms {
            sum += &term;
            term = term * x / Rational::from_integer(BigInt::from(k + 1));
        }
        // remainder ≤ x^{K}/K! · e^x ≤ 3·term for x ≤ 1
        let hi = &sum + &term * Rational::from_integer(BigInt::from(3));
        (sum, hi)
    }

    fn sqrt_bounds(lo: &Rational, hi: &Rational, bits: u32) -> (Rational, Rational) {
        let eps = pow2_neg(bits);
        let bisect = |target: &Rational, upward: bool| {
            let mut a = Rational::zero();
            let mut b = Rational::from_integer(BigInt::from(2));
            while &b - &a > eps {
                let mid = (&a + &b) / Rational::from_integer(BigInt::from(2));
                if &(&mid * &mid) <= target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            if upward {
                b
            } else {
                a
            }
        };
        (bisect(lo, false), bisect(hi, true))
    }

    fn oracle(n: u64) -> (Rational, Rational) {
        let x = Rational::new(BigInt::one(), BigInt::from(n + 1));
        let (e_lo, e_hi) = exp_bounds(&x, 40);
        let (s_lo, s_hi) = sqrt_bounds(&(&e_lo - Rational::one()), &(&e_hi - Rational::one()), 70);
        (&s_lo / &e_hi, &s_hi / &e_lo)
    }

    #[test]
    fn enclosure_contains_oracle_midpoint() {
        for n in [0u64, 1, 2, 3, 10, 100, 1000] {
            let (olo, ohi) = oracle(n);
            let (lo, hi) = delta_enclosure(n, 80);
            assert!(lo <= ohi && olo <= hi, "n={n}");
        }
    }

    #[test]
    fn delta_matches_oracle_within_contract() {
        for n in [0u64, 1, 2, 3, 10, 100, 1000] {
            let (olo, ohi) = oracle(n);
            for bits in [4u32, 10, 20, 40] {
                let d = delta(n, bits);
                let tol = pow2_neg(bits);
                assert!((&d - &olo).abs() < tol && (&d - &ohi).abs() < tol, "n={n} bits={bits}");
            }
        }
    }

    #[test]
    fn frozen_values() {
        // mpmath, 40 digits
        let cases = [
            (0u64, 0.482_228_325_521_043_6f64),
            (1, 0.488_519_414_702_416),
            (10, 0.281_687_412_226_889_9),
            (1_000_000, 0.000_999_998_750_001_802_1),
        ];
        for (n, want) in cases {
            let got = to_f64(&delta(n, 20));
            assert!((got - want).abs() < 2f64.powi(-20), "n={n}: {got} vs {want}");
        }
    }

    #[test]
    fn tail_is_decreasing_and_below_half() {
        let mut prev = delta(10, 10);
        for n in 11..1000u64 {
            let d = delta(n, 24);
            assert!(d < Rational::new(BigInt::one(), BigInt::from(2)));
            assert!(d.is_positive());
            assert!(d <= &prev + pow2_neg(23), "n={n}");
            prev = d;
        }
        let far = to_f64(&delta(1000, 10));
        assert!(far < to_f64(&delta(10, 10)));
    }
}
