//! Church statistics and estimators against direct counting oracles.

use irand_core::model::{ForecastingSystem, Outcome, Situation};
use irand_core::stochasticity::{
    church_statistics, church_verdict, i_phi_estimate, smallest_interval_estimate, AllOnes, Parity, PatternSuffix,
    Periodic, SelectionProcess, Surrogate,
};
use irand_core::{rational, Interval, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn bits(min: usize, max: usize) -> impl Strategy<Value = Situation> {
    proptest::collection::vec(any::<bool>(), min..max).prop_map(|v| v.into_iter().map(Outcome::from_bool).collect())
}

fn unit_interval() -> impl Strategy<Value = Interval> {
    (0i64..=16, 0i64..=16).prop_map(|(a, b)| Interval::new(rational(a.min(b), 16), rational(a.max(b), 16)).unwrap())
}

fn surrogate() -> impl Strategy<Value = Surrogate> {
    prop_oneof![Just(Surrogate::Final), Just(Surrogate::Running), Just(Surrogate::TailWindow)]
}

/// Selected-ones frequency by direct counting: selector at `|s| = k` gates
/// the outcome at index `k`.
fn counted_frequency(prefix: &Situation, keep: impl Fn(usize) -> bool) -> Option<Rational> {
    let picked: Vec<bool> = (0..prefix.len()).filter(|&k| keep(k)).map(|k| prefix.get(k).as_bool()).collect();
    if picked.is_empty() {
        return None;
    }
    let ones = picked.iter().filter(|&&b| b).count();
    Some(Rational::new(BigInt::from(ones), BigInt::from(picked.len())))
}

fn family() -> Vec<Box<dyn SelectionProcess>> {
    vec![
        Box::new(AllOnes),
        Box::new(Parity { r: 0, m: 2 }),
        Box::new(Parity { r: 1, m: 2 }),
        Box::new(Periodic { k: 3 }),
        Box::new(PatternSuffix { pattern: vec![Outcome::One] }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn final_frequencies_match_counting(prefix in bits(1, 200)) {
        let checks: Vec<(Box<dyn SelectionProcess>, Box<dyn Fn(usize) -> bool>)> = vec![
            (Box::new(AllOnes), Box::new(|_| true)),
            (Box::new(Parity { r: 1, m: 2 }), Box::new(|k| k % 2 == 1)),
            (Box::new(Periodic { k: 3 }), Box::new(|k| (k + 1) % 3 == 0)),
        ];
        let p = ForecastingSystem::precise(rational(1, 3)).unwrap();
        for (sel, keep) in checks {
            let st = church_statistics(&prefix, &p, sel.as_ref(), 1, 16).unwrap();
            prop_assert_eq!(st.final_frequency().cloned(), counted_frequency(&prefix, keep));
        }
        // after an outcome 1 (pattern suffix "1")
        let st = church_statistics(&prefix, &p, &PatternSuffix { pattern: vec![Outcome::One] }, 1, 16).unwrap();
        let expected = counted_frequency(&prefix, |k| k > 0 && prefix.get(k - 1).as_bool());
        prop_assert_eq!(st.final_frequency().cloned(), expected);
    }

    /// With S ≡ 1 and a precise p, the lower ratio is the ones frequency minus p.
    #[test]
    fn lower_ratio_identity(prefix in bits(1, 200), p in 0i64..=10) {
        let p = rational(p, 10);
        let sys = ForecastingSystem::precise(p.clone()).unwrap();
        let st = church_statistics(&prefix, &sys, &AllOnes, 1, 16).unwrap();
        let freq = rational(prefix.count_ones() as i64, prefix.len() as i64);
        prop_assert_eq!(st.lower.final_value.unwrap(), &freq - &p);
        prop_assert_eq!(st.upper.final_value.unwrap(), freq - p);
    }

    #[test]
    fn verdict_monotone_in_interval(
        prefix in bits(1, 200),
        inner in unit_interval(),
        widen in (0i64..=8, 0i64..=8),
        burn_in in 1usize..20,
        surrogate in surrogate(),
    ) {
        let lo = (inner.lo() - rational(widen.0, 16)).max(rational(0, 1));
        let hi = (inner.hi() + rational(widen.1, 16)).min(rational(1, 1));
        let outer = Interval::new(lo, hi).unwrap();
        let fam = family();
        let refs: Vec<&dyn SelectionProcess> = fam.iter().map(|b| b.as_ref()).collect();
        let zero = rational(0, 1);
        let a = church_verdict(&prefix, &inner, &refs, burn_in, &zero, surrogate).unwrap();
        let b = church_verdict(&prefix, &outer, &refs, burn_in, &zero, surrogate).unwrap();
        prop_assert!(!a.pass || b.pass);
        prop_assert!(church_verdict(&prefix, &Interval::vacuous(), &refs, burn_in, &zero, surrogate).unwrap().pass);
    }

    #[test]
    fn estimator_sandwich_and_subfamily(prefix in bits(4, 300), surrogate in surrogate(), split in 1usize..5) {
        let fam = family();
        let refs: Vec<&dyn SelectionProcess> = fam.iter().map(|b| b.as_ref()).collect();
        let full = smallest_interval_estimate(&prefix, &refs, 1, 1, surrogate).unwrap();
        let overall = rational(prefix.count_ones() as i64, prefix.len() as i64);
        prop_assert!(full.lo <= overall && overall <= full.hi);
        // any sub-family containing all_ones gives a contained estimate
        let sub = smallest_interval_estimate(&prefix, &refs[..split], 1, 1, surrogate).unwrap();
        prop_assert!(full.lo <= sub.lo && sub.hi <= full.hi);
        // bounds are attained by named selections in the breakdown
        let names: Vec<_> = full.breakdown.iter().map(|b| b.id.clone()).collect();
        prop_assert!(names.contains(&full.attained_by.lo) && names.contains(&full.attained_by.hi));
    }

    /// Exact systems give precision-independent envelopes.
    #[test]
    fn i_phi_precision_invariant(prefix in bits(1, 100), n in 1u32..40) {
        let sys = ForecastingSystem::alternating(rational(3, 10), rational(7, 10)).unwrap();
        let a = i_phi_estimate(&prefix, &sys, n).unwrap();
        let b = i_phi_estimate(&prefix, &sys, n + 17).unwrap();
        prop_assert_eq!(a.overall_interval(), b.overall_interval());
        prop_assert_eq!(a.tail_interval(), b.tail_interval());
    }
}

#[test]
fn phi_half_tail_envelope_tracks_delta() {
    use irand_core::model::reals::delta;
    let n = 10_000usize;
    let prefix: Situation = (0..n).map(|k| Outcome::from_bool(k % 3 == 0)).collect();
    let est = i_phi_estimate(&prefix, &ForecastingSystem::PhiHalf, 40).unwrap();
    // oracle: δ is decreasing, so the tail maximum sits at the first even
    // length ≥ ⌈n/2⌉ and the minimum at the first odd one
    let n0 = n.div_ceil(2);
    let even = if n0 % 2 == 0 { n0 } else { n0 + 1 };
    let odd = if n0 % 2 == 1 { n0 } else { n0 + 1 };
    let tol = 1e-9;
    let to_f = |r: &Rational| irand_core::scalar::to_f64(r);
    assert!((to_f(&est.tail.max) - (0.5 + to_f(&delta(even as u64, 40)))).abs() < tol);
    assert!((to_f(&est.tail.min) - (0.5 - to_f(&delta(odd as u64, 40)))).abs() < tol);
    assert!(est.tail_interval().is_subset_of(&est.overall_interval()));
    assert!(!est.exact);
}
