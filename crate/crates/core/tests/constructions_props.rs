//! Constructions: greedy paths, diagonalisation, sampling policies, the
//! imitator and the double-or-hold pair.

use std::sync::Arc;

use irand_core::constructions::{
    diagonal_path, double_or_hold_pair, greedy_bounded_path, is_double_or_hold, sample_path, RealityPolicy,
};
use irand_core::martingale::{replay, BettingStrategy, CapitalMode, Direction, Generator, PositionRule, StrategySpec};
use irand_core::model::reals::{delta, delta_enclosure};
use irand_core::model::{ForecastingSystem, Outcome, Situation};
use irand_core::scalar::to_f64;
use irand_core::stochasticity::{church_statistics, AllOnes, DoublingDetector};
use irand_core::{rational, Interval};
use proptest::prelude::*;

fn half() -> Interval {
    Interval::precise(rational(1, 2)).unwrap()
}

fn half_spec() -> impl Strategy<Value = StrategySpec> {
    let lambda = (1i64..=8).prop_map(|k| rational(k, 8));
    prop_oneof![
        (any::<u64>(), lambda.clone()).prop_map(|(seed, max_stake)| StrategySpec::PseudoRandom { seed, max_stake }),
        (any::<bool>(), lambda.clone()).prop_map(|(b, lambda)| StrategySpec::FractionalExploit {
            direction: if b { Direction::Up } else { Direction::Down },
            interval: half(),
            lambda,
        }),
        (any::<u64>(), lambda).prop_map(|(seed, lambda)| StrategySpec::Imitator {
            generator: Generator::SplitMix { seed },
            lambda,
            interval: half(),
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_never_exceeds_bound(spec in half_spec(), horizon in 0usize..400) {
        let s = spec.build().unwrap();
        let g = greedy_bounded_path(s.as_ref(), &rational(1, 1), &Situation::empty(), horizon).unwrap();
        prop_assert!(g.bound_held);
        // independent replay of the produced path
        let t = replay(s.as_ref(), &g.path, CapitalMode::Exact, true).unwrap();
        prop_assert!(t.exact().unwrap().iter().all(|c| *c <= rational(1, 1)));
        prop_assert_eq!(t.exact().unwrap().last().unwrap(), &g.final_capital);
    }

    #[test]
    fn diagonal_invariant(seeds in proptest::collection::vec(any::<u64>(), 0..5), target_seed in any::<u64>()) {
        let adversaries: Vec<Arc<dyn BettingStrategy>> = seeds
            .iter()
            .map(|&seed| StrategySpec::PseudoRandom { seed, max_stake: rational(1, 2) }.build().unwrap())
            .collect();
        let target = StrategySpec::PseudoRandom { seed: target_seed, max_stake: rational(3, 4) }.build().unwrap();
        let milestones: Vec<_> = (1..=5).map(|k| rational(1 << k, 1)).collect();
        let (path, rep) = diagonal_path(target.as_ref(), &adversaries, &milestones, 80).unwrap();
        prop_assert!(rep.invariant_held);
        prop_assert_eq!(rep.weighted_sum.len(), path.len() + 1);
        prop_assert!(rep.milestones.windows(2).all(|w| w[0] < w[1]));
        // recorded milestone capitals meet their values
        for (k, t) in rep.target_at_milestones.iter().enumerate() {
            prop_assert!(*t >= milestones[k]);
        }
        // independent recomputation of the weighted sum at the end
        let n = path.len();
        let mut sum = rational(0, 1);
        for (k, adv) in adversaries.iter().enumerate().take(rep.milestones.len()) {
            let nk = rep.milestones[k];
            let t = replay(adv.as_ref(), &path, CapitalMode::Exact, false).unwrap();
            sum += t.exact().unwrap()[n].clone() * rational(1, 1) / irand_core::Rational::from_integer(num_bigint::BigInt::from(1u8) << (nk + k));
        }
        prop_assert_eq!(&sum, rep.weighted_sum.last().unwrap());
    }

    /// The min-capital policy never lets its strategy rise above 1.
    #[test]
    fn min_capital_policy(spec in half_spec(), horizon in 0usize..300) {
        let path = sample_path(&ForecastingSystem::Vacuous, &RealityPolicy::MinCapital { strategy: spec.clone() }, horizon, 0, 16).unwrap();
        let t = replay(spec.build().unwrap().as_ref(), &path, CapitalMode::Exact, true).unwrap();
        prop_assert!(t.exact().unwrap().iter().all(|c| *c <= rational(1, 1)));
    }

    /// Replayed on its own generator's output the imitator is right every
    /// time, so its capital strictly increases at every step.
    #[test]
    fn imitator_exploits_its_generator(seed in any::<u64>(), lo in 1i64..8, hi in 8i64..15, horizon in 1usize..200) {
        let generator = Generator::SplitMix { seed };
        let path: Situation = (0..horizon as u64).map(|k| generator.bit(k)).collect();
        let interval = Interval::new(rational(lo, 16), rational(hi, 16)).unwrap();
        let s = StrategySpec::Imitator { generator, lambda: rational(1, 2), interval }.build().unwrap();
        let t = replay(s.as_ref(), &path, CapitalMode::Exact, true).unwrap();
        prop_assert!(t.exact().unwrap().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn double_or_hold_structure(seed in any::<u64>(), k in 1usize..9, horizon in 1usize..600) {
        let (strategy, path) = double_or_hold_pair(PositionRule::Every { k }, horizon, seed);
        let st = church_statistics(&path, &ForecastingSystem::Vacuous, &DoublingDetector { strategy: strategy.clone() }, 1, 8).unwrap();
        let designated = (0..horizon).filter(|&n| PositionRule::Every { k }.is_designated(n)).count() as u64;
        prop_assert_eq!(st.selected_count, designated);
        prop_assert_eq!(st.selected_ones, designated);
        for n in (0..=horizon).step_by(37) {
            prop_assert!(is_double_or_hold(strategy.as_ref(), &path.prefix(n)).unwrap());
        }
    }
}

#[test]
fn delta_matches_closed_form() {
    for n in (0u64..2000).chain([10_000, 123_456, 1_000_000]) {
        let x = 1.0 / (n as f64 + 1.0);
        let oracle = (-x).exp() * x.exp_m1().sqrt();
        let d = to_f64(&delta(n, 48));
        assert!((d - oracle).abs() < 1e-13, "n={n}: {d} vs {oracle}");
        let (lo, hi) = delta_enclosure(n, 80);
        assert!(lo <= delta(n, 48) + irand_core::scalar::pow2_neg(48));
        assert!(hi >= delta(n, 48) - irand_core::scalar::pow2_neg(48));
    }
}

#[test]
fn sampling_golden_frequencies() {
    let bern = ForecastingSystem::precise(rational(3, 10)).unwrap();
    let path = sample_path(&bern, &RealityPolicy::AtMid, 100_000, 42, 32).unwrap();
    let st = church_statistics(&path, &bern, &AllOnes, 30, 32).unwrap();
    let f = to_f64(st.final_frequency().unwrap());
    assert!((0.29..=0.31).contains(&f), "{f}");
    let twice = sample_path(&bern, &RealityPolicy::AtMid, 100_000, 42, 32).unwrap();
    assert_eq!(path, twice);
    let _ = Outcome::BOTH;
}
