//! Property tests for the upper-expectation calculus against an
//! independent grid oracle.

use irand_core::expectation::{allowable_bound, clip_step, upper_expectation, Gamble};
use irand_core::scalar::{add_fast, div_fast, gcd_fast, mul_fast};
use irand_core::{rational, Interval, Rational, RationalGamble};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Rational> {
    (0i64..=48, 1i64..=48).prop_map(|(a, b)| rational(a.min(b), b))
}

fn interval() -> impl Strategy<Value = Interval> {
    (unit(), unit()).prop_map(|(a, b)| if a <= b { Interval::new(a, b) } else { Interval::new(b, a) }.unwrap())
}

fn interior_interval() -> impl Strategy<Value = Interval> {
    (1i64..48, 1i64..48).prop_map(|(a, b)| Interval::new(rational(a.min(b), 48), rational(a.max(b), 48)).unwrap())
}

fn value() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=13).prop_map(|(a, b)| rational(a, b))
}

fn gamble() -> impl Strategy<Value = RationalGamble> {
    (value(), value()).prop_map(|(a, b)| Gamble::new(a, b))
}

/// Maximum of `p·f(1) + (1−p)·f(0)` over a 65-point grid of `I` that
/// includes both endpoints. The expectation is affine in `p`, so the grid
/// maximum is the true supremum.
fn grid_oracle(i: &Interval, f: &RationalGamble) -> Rational {
    let steps = 64;
    (0..=steps)
        .map(|k| {
            let p = i.lo() + i.width() * rational(k, steps);
            &p * &f.at1 + (Rational::one() - &p) * &f.at0
        })
        .max()
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn matches_grid_oracle(i in interval(), f in gamble()) {
        prop_assert_eq!(upper_expectation(&i, &f), grid_oracle(&i, &f));
    }

    #[test]
    fn coherence_axioms(i in interval(), f in gamble(), g in gamble(), l in (0i64..30, 1i64..9), mu in value()) {
        let lambda = rational(l.0, l.1);
        let ef = upper_expectation(&i, &f);
        prop_assert!(f.min_value() <= ef && ef <= f.max_value());
        prop_assert_eq!(upper_expectation(&i, &f.scale(&lambda)), &lambda * &ef);
        prop_assert!(upper_expectation(&i, &(f.clone() + g.clone())) <= &ef + upper_expectation(&i, &g));
        prop_assert_eq!(upper_expectation(&i, &f.shift(&mu)), &ef + &mu);
        let h = f.clone() + g.positive_part();
        prop_assert!(upper_expectation(&i, &h) >= ef);
    }

    #[test]
    fn nesting(outer in interval(), a in unit(), b in unit(), f in gamble()) {
        let lo = outer.lo() + outer.width() * &a;
        let hi = &lo + (outer.hi() - &lo) * &b;
        let inner = Interval::new(lo, hi).unwrap();
        prop_assert!(upper_expectation(&inner, &f) <= upper_expectation(&outer, &f));
    }

    #[test]
    fn stake_bound_is_tight(i in interior_interval(), f0 in (0i64..80, 1i64..9), f1 in (0i64..80, 1i64..9)) {
        let k = allowable_bound(&i).unwrap();
        let f = Gamble::new(rational(f0.0, f0.1), rational(f1.0, f1.1));
        let e = upper_expectation(&i, &f);
        let f = if e > Rational::one() { f.scale(&(Rational::one() / e)) } else { f };
        prop_assert!(f.at0 <= k && f.at1 <= k);
        // oracle: the largest payoff on each side with Ē ≤ 1
        let up = Rational::one() / i.hi();
        let down = Rational::one() / (Rational::one() - i.lo());
        prop_assert_eq!(upper_expectation(&i, &Gamble::new(Rational::zero(), up.clone())), Rational::one());
        prop_assert_eq!(k, up.max(down));
    }

    #[test]
    fn clip_step_keeps_validity(i in interval(), c in gamble(), prev in gamble()) {
        let prev = prev.positive_part();
        let e = upper_expectation(&i, &prev);
        let prev = if e > Rational::one() { prev.scale(&(Rational::one() / e)) } else { prev };
        let out = clip_step(&i, &c, &prev);
        prop_assert!(out.is_nonneg());
        prop_assert!(upper_expectation(&i, &out) <= Rational::one());
    }

    #[test]
    fn fast_arithmetic_agrees(a in (-10_000i64..10_000, 1i64..5000), b in (-10_000i64..10_000, 1i64..5000), shift in 0usize..300) {
        let big = BigInt::from(3u8).pow(shift as u32) << shift;
        let x = rational(a.0, a.1) * Rational::from_integer(big.clone());
        let y = rational(b.0, b.1) / Rational::from_integer(big + 1);
        prop_assert_eq!(mul_fast(&x, &y), &x * &y);
        prop_assert_eq!(add_fast(&x, &y), &x + &y);
        if !y.is_zero() {
            prop_assert_eq!(div_fast(&x, &y), &x / &y);
        }
        prop_assert_eq!(gcd_fast(x.numer(), y.denom()), x.numer().gcd(y.denom()));
    }
}

#[test]
fn spec_examples() {
    let quarter = Interval::new(rational(1, 4), rational(3, 4)).unwrap();
    assert_eq!(upper_expectation(&Interval::vacuous(), &Gamble::new(rational(-1, 1), rational(1, 1))), rational(1, 1));
    assert_eq!(upper_expectation(&quarter, &Gamble::new(rational(-1, 1), rational(2, 1))), rational(5, 4));
    assert_eq!(allowable_bound(&Interval::new(rational(1, 10), rational(1, 2)).unwrap()).unwrap(), rational(2, 1));
}
