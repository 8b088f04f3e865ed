//! Exact invariant suites, run by the CLI `selftest` command and by the
//! test suite. Every suite is deterministic for its seed and checks
//! algebraic identities with exact rational arithmetic.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::constructions::{diagonal_path, greedy_bounded_path, SplitMix64};
use crate::expectation::{allowable_bound, clip_step, is_allowable, lower_expectation, upper_expectation};
use crate::martingale::{
    discount_adapt, mixture, multiplier_of, difference_of, replay, validate_declared, validate_step,
    BettingStrategy, CapitalCursor, CapitalMode, ConstantStrategy, Declared, Direction, Generator, PositionRule,
    StrategySpec, TreeProcess,
};
use crate::model::{ForecastingSystem, Outcome, Situation};
use crate::scalar::pow2_neg;
use crate::{rational, Interval, Rational, RationalGamble, Result};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    /// Description of the first violated property, if any.
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), cases: 0, failures: 0, first_failure: None }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn fail_with(&mut self, err: crate::Error) {
        self.cases += 1;
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(err.to_string());
        }
    }
}

/// Sizes of the suites; [`Default`] is the full selftest.
#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub seed: u64,
    pub expectation_cases: usize,
    pub equivalence_trees: usize,
    pub equivalence_max_depth: usize,
    pub registry_cases: usize,
    pub mixture_paths: usize,
    pub adapt_paths: usize,
    pub adapt_horizon: usize,
    pub greedy_horizon: usize,
    pub diagonal_stage_cap: usize,
    /// Adds a strategy with `Ē > 1` to the replay audit.
    pub inject_fault: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            seed: 0x5EED,
            expectation_cases: 10_000,
            equivalence_trees: 200,
            equivalence_max_depth: 12,
            registry_cases: 10_000,
            mixture_paths: 20,
            adapt_paths: 20,
            adapt_horizon: 1_000,
            greedy_horizon: 1_000,
            diagonal_stage_cap: 200,
            inject_fault: false,
        }
    }
}

impl SelftestConfig {
    /// A reduced configuration for quick runs.
    pub fn quick() -> Self {
        Self {
            expectation_cases: 1_000,
            equivalence_trees: 24,
            equivalence_max_depth: 8,
            registry_cases: 1_000,
            mixture_paths: 4,
            adapt_paths: 4,
            adapt_horizon: 200,
            greedy_horizon: 200,
            diagonal_stage_cap: 60,
            ..Self::default()
        }
    }
}

/// Runs every suite in a fixed order.
pub fn run_all(config: &SelftestConfig) -> Vec<SuiteResult> {
    let mut out = vec![
        upper_expectation_suite(config.seed, config.expectation_cases),
        continuity_suite(config.seed, config.expectation_cases / 10),
        stake_bound_suite(config.seed, config.expectation_cases),
        nesting_suite(config.seed, config.expectation_cases),
        clip_step_suite(config.seed, config.expectation_cases),
        multiplier_equivalence_suite(config.seed, config.equivalence_trees, config.equivalence_max_depth),
        registry_suite(config.seed, config.registry_cases),
        mixture_suite(config.seed, config.mixture_paths),
        discount_adapt_suite(config.seed, config.adapt_paths, config.adapt_horizon),
        greedy_suite(config.greedy_horizon),
        diagonal_suite(config.seed, config.diagonal_stage_cap),
    ];
    if config.inject_fault {
        out.push(fault_injection_suite());
    }
    out
}

// ---------------------------------------------------------------------------
// random rationals

/// Random rational `a/b` with `|a| ≤ max_num`, `1 ≤ b ≤ max_den`.
pub fn random_rational(rng: &mut SplitMix64, max_num: u64, max_den: u64, signed: bool) -> Rational {
    let a = rng.below(max_num + 1) as i64;
    let a = if signed && rng.next_u64() >> 63 == 1 { -a } else { a };
    let b = 1 + rng.below(max_den) as i64;
    Rational::new(BigInt::from(a), BigInt::from(b))
}

fn random_unit(rng: &mut SplitMix64) -> Rational {
    // endpoints turn up regularly, as do dyadics and small denominators
    match rng.below(10) {
        0 => Rational::zero(),
        1 => Rational::one(),
        _ => {
            let den = 1 + rng.below(64);
            Rational::new(BigInt::from(rng.below(den + 1)), BigInt::from(den))
        }
    }
}

/// Random interval forecast; precise in about a fifth of the cases.
pub fn random_interval(rng: &mut SplitMix64) -> Interval {
    let a = random_unit(rng);
    if rng.below(5) == 0 {
        return Interval::precise(a).expect("unit value");
    }
    let b = random_unit(rng);
    if a <= b {
        Interval::new(a, b)
    } else {
        Interval::new(b, a)
    }
    .expect("ordered unit values")
}

fn random_interior_interval(rng: &mut SplitMix64) -> Interval {
    loop {
        let i = random_interval(rng);
        if i.is_interior() {
            return i;
        }
    }
}

fn random_gamble(rng: &mut SplitMix64) -> RationalGamble {
    RationalGamble::new(random_rational(rng, 40, 12, true), random_rational(rng, 40, 12, true))
}

fn random_situation(rng: &mut SplitMix64, max_len: u64) -> Situation {
    let len = rng.below(max_len + 1);
    (0..len).map(|_| Outcome::from_bool(rng.next_u64() >> 63 == 1)).collect()
}

fn endpoint_oracle(i: &Interval, f: &RationalGamble) -> Rational {
    let lo = f.linear_expectation(i.lo());
    let hi = f.linear_expectation(i.hi());
    if lo > hi {
        lo
    } else {
        hi
    }
}

// ---------------------------------------------------------------------------
// expectation calculus

/// Coherence axioms and the endpoint case split.
pub fn upper_expectation_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("upper expectation axioms");
    let mut rng = SplitMix64::new(seed ^ 0xC1);
    for _ in 0..cases {
        let i = random_interval(&mut rng);
        let f = random_gamble(&mut rng);
        let g = random_gamble(&mut rng);
        let lambda = random_rational(&mut rng, 20, 7, false);
        let mu = random_rational(&mut rng, 20, 7, true);
        let ef = upper_expectation(&i, &f);
        let eg = upper_expectation(&i, &g);

        r.check(f.min_value() <= ef && ef <= f.max_value(), || format!("bounds fail for {f} under {i}"));
        r.check(upper_expectation(&i, &f.scale(&lambda)) == &lambda * &ef, || {
            format!("homogeneity fails for {f}, λ={lambda} under {i}")
        });
        r.check(upper_expectation(&i, &(f.clone() + g.clone())) <= &ef + &eg, || {
            format!("subadditivity fails for {f} + {g} under {i}")
        });
        r.check(upper_expectation(&i, &f.shift(&mu)) == &ef + &mu, || format!("translation fails for {f}, μ={mu} under {i}"));
        // monotonicity on f ≤ max(f, g)
        let h = RationalGamble::new(f.at0.clone().max(g.at0.clone()), f.at1.clone().max(g.at1.clone()));
        r.check(f.le(&h) && ef <= upper_expectation(&i, &h), || format!("monotonicity fails for {f} ≤ {h} under {i}"));
        r.check(ef == endpoint_oracle(&i, &f), || format!("case split disagrees with endpoints for {f} under {i}"));
        r.check(lower_expectation(&i, &f) == -upper_expectation(&i, &f.negate()), || {
            format!("conjugacy fails for {f} under {i}")
        });
        r.check(is_allowable(&i, &f) == !ef.is_positive(), || format!("allowability disagrees for {f} under {i}"));
    }
    r
}

/// Continuity in finite form: `f_n = f + 2^-n·g` converges to `f`, and `Ē(f_n)`
/// converges to `Ē(f)` at rate `max|g|·2^-n`; at `n = 64` within `2^-32`.
pub fn continuity_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("upper expectation continuity");
    let mut rng = SplitMix64::new(seed ^ 0xC6);
    for _ in 0..cases.max(1) {
        let i = random_interval(&mut rng);
        let f = random_gamble(&mut rng);
        let g = random_gamble(&mut rng);
        let limit = upper_expectation(&i, &f);
        let size = g.at0.abs().max(g.at1.abs());
        let mut ok = true;
        for n in [1u32, 8, 16, 32, 64] {
            let eps = pow2_neg(n);
            let fn_ = f.clone() + g.scale(&eps);
            let gap = (upper_expectation(&i, &fn_) - &limit).abs();
            ok &= gap <= &size * &eps;
            if n == 64 {
                ok &= gap <= pow2_neg(32);
            }
        }
        r.check(ok, || format!("continuity fails for {f} + 2^-n·{g} under {i}"));
    }
    r
}

/// stake bound: non-negative `f` with `Ē_I(f) ≤ 1` satisfies `f ≤ K`
/// pointwise, and the bound is attained.
pub fn stake_bound_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("stake bound");
    let mut rng = SplitMix64::new(seed ^ 0x11);
    for _ in 0..cases {
        let i = random_interior_interval(&mut rng);
        let one = Rational::one();
        let b1 = &one / i.hi();
        let b0 = &one / (&one - i.lo());
        let k = match allowable_bound(&i) {
            Ok(k) => k,
            Err(e) => {
                r.fail_with(e);
                continue;
            }
        };
        r.check(k == b0.clone().max(b1.clone()), || format!("K for {i} is {k}"));
        // attainment: each one-sided all-in gamble has Ē exactly 1
        let up = RationalGamble::new(Rational::zero(), b1.clone());
        let down = RationalGamble::new(b0.clone(), Rational::zero());
        r.check(upper_expectation(&i, &up).is_one() && upper_expectation(&i, &down).is_one(), || {
            format!("stake bound not attained for {i}")
        });
        // random non-negative gambles scaled into the allowable region
        let f = RationalGamble::new(random_rational(&mut rng, 30, 9, false), random_rational(&mut rng, 30, 9, false));
        let e = upper_expectation(&i, &f);
        let f = if e > one { f.scale(&(&one / &e)) } else { f };
        r.check(f.at1 <= b1 && f.at0 <= b0, || format!("{f} exceeds the stake bound under {i}"));
    }
    r
}

/// `I'' ⊆ I ⇒ Ē_{I''}(f) ≤ Ē_I(f)`.
pub fn nesting_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("subinterval monotonicity");
    let mut rng = SplitMix64::new(seed ^ 0x5B);
    for _ in 0..cases {
        let outer = random_interval(&mut rng);
        let width = outer.width();
        let a = outer.lo() + &width * random_unit(&mut rng);
        let b = &a + (outer.hi() - &a) * random_unit(&mut rng);
        let inner = Interval::new(a, b).expect("nested values");
        let f = random_gamble(&mut rng);
        r.check(inner.is_subset_of(&outer) && upper_expectation(&inner, &f) <= upper_expectation(&outer, &f), || {
            format!("nesting fails for {f}: {inner} ⊆ {outer}")
        });
    }
    r
}

pub fn clip_step_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("clip_step postcondition");
    let mut rng = SplitMix64::new(seed ^ 0xC5);
    let one = Rational::one();
    for _ in 0..cases {
        let i = random_interval(&mut rng);
        let mut previous = RationalGamble::zero();
        for _ in 0..4 {
            let candidate = random_gamble(&mut rng);
            let out = clip_step(&i, &candidate, &previous);
            let clipped = candidate.positive_part();
            let valid = |g: &RationalGamble| g.is_nonneg() && upper_expectation(&i, g) <= one;
            let expected = if valid(&clipped) { clipped } else { previous.clone() };
            r.check(valid(&out) && out == expected, || format!("clip_step({candidate}, {previous}) under {i}"));
            r.check(clip_step(&i, &out, &out) == out, || format!("clip_step not idempotent on {out} under {i}"));
            previous = out;
        }
    }
    r
}

// ---------------------------------------------------------------------------
// martingale engine

/// Multiplier equivalence: for positive `M`, `Ē(ΔM(s)) ≤ 0 ⇔ Ē(D_M(s)) ≤ 1` at every node.
pub fn multiplier_equivalence_suite(seed: u64, trees: usize, max_depth: usize) -> SuiteResult {
    let mut r = SuiteResult::new("multiplier equivalence");
    let mut rng = SplitMix64::new(seed ^ 0x22);
    let max_depth = max_depth.max(1);
    for t in 0..trees {
        let depth = 1 + t % max_depth;
        let tree = TreeProcess::random(depth, &mut rng, 16, 8);
        for s in tree.inner_nodes() {
            let i = random_interval(&mut rng);
            let parent = tree.value(&s).expect("inner node");
            let (c0, c1) = tree.children(&s).expect("inner node");
            let delta = difference_of(parent, c0, c1);
            let d = match multiplier_of(parent, c0, c1) {
                Ok(d) => d,
                Err(e) => {
                    r.fail_with(e);
                    continue;
                }
            };
            let lhs = !upper_expectation(&i, &delta).is_positive();
            let rhs = upper_expectation(&i, &d) <= Rational::one();
            r.check(lhs == rhs, || format!("multiplier equivalence fails at {s} of tree {t} under {i}"));
        }
    }
    r
}

/// A registry spec for `{1/2}` drawn at random.
fn random_half_spec(rng: &mut SplitMix64) -> StrategySpec {
    let half = Interval::precise(rational(1, 2)).expect("1/2");
    let lambda = Rational::new(BigInt::from(1 + rng.below(16)), BigInt::from(16));
    let bit = Outcome::from_bool(rng.next_u64() >> 63 == 1);
    match rng.below(7) {
        0 => StrategySpec::Hold { interval: Some(half) },
        1 => StrategySpec::DoubleOn { bit },
        2 => StrategySpec::AllInOn { bit, interval: half },
        3 => StrategySpec::FractionalExploit {
            direction: if bit.as_bool() { Direction::Up } else { Direction::Down },
            interval: half,
            lambda,
        },
        4 => StrategySpec::Imitator { generator: Generator::SplitMix { seed: rng.next_u64() }, lambda, interval: half },
        5 => StrategySpec::PseudoRandom { seed: rng.next_u64(), max_stake: lambda },
        _ => StrategySpec::DoubleOrHold { positions: PositionRule::Every { k: 1 + rng.below(5) as usize } },
    }
}

/// A registry spec for an arbitrary interval drawn at random.
fn random_spec(rng: &mut SplitMix64) -> StrategySpec {
    let i = random_interior_interval(rng);
    let lambda = Rational::new(BigInt::from(1 + rng.below(16)), BigInt::from(16));
    let bit = Outcome::from_bool(rng.next_u64() >> 63 == 1);
    match rng.below(5) {
        0 => StrategySpec::Hold { interval: Some(i) },
        1 => StrategySpec::AllInOn { bit, interval: i },
        2 => StrategySpec::FractionalExploit {
            direction: if bit.as_bool() { Direction::Up } else { Direction::Down },
            interval: i,
            lambda,
        },
        3 => StrategySpec::Imitator { generator: Generator::SplitMix { seed: rng.next_u64() }, lambda, interval: i },
        _ => random_half_spec(rng),
    }
}

/// Every registry strategy is a test supermartingale for its declaration.
pub fn registry_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut r = SuiteResult::new("registry validity");
    let mut rng = SplitMix64::new(seed ^ 0x4E);
    for _ in 0..cases {
        let spec = random_spec(&mut rng);
        let strategy = match spec.build() {
            Ok(s) => s,
            Err(e) => {
                r.fail_with(e);
                continue;
            }
        };
        let s = random_situation(&mut rng, 24);
        let outcome = strategy.evaluator().multiplier(&s).and_then(|d| {
            let ok = validate_declared(strategy.declared(), &s, &d)?.0;
            Ok((ok, d))
        });
        match outcome {
            Ok((ok, d)) => r.check(ok, || format!("{} at {s} plays {d}", strategy.name())),
            Err(e) => r.fail_with(e),
        }
    }
    r
}

/// Mixtures of valid strategies are valid, and their capital is the
/// weighted sum of the component capitals.
pub fn mixture_suite(seed: u64, paths: usize) -> SuiteResult {
    let mut r = SuiteResult::new("mixture closure");
    let mut rng = SplitMix64::new(seed ^ 0x31);
    for _ in 0..paths {
        let m = 1 + rng.below(4) as usize;
        let parts: Vec<Arc<dyn BettingStrategy>> =
            (0..m).filter_map(|_| random_half_spec(&mut rng).build().ok()).collect();
        let mix = match mixture(parts.clone(), parts.len()) {
            Ok(mix) => mix,
            Err(e) => {
                r.fail_with(e);
                continue;
            }
        };
        let path = random_situation(&mut rng, 60);
        if let Err(e) = replay(&mix, &path, CapitalMode::Exact, true) {
            r.fail_with(e);
            continue;
        }
        let mut cursor = CapitalCursor::new(&mix);
        let mut cursors: Vec<_> = parts.iter().map(|p| CapitalCursor::new(p.as_ref())).collect();
        for n in 0..=path.len() {
            let s = path.prefix(n);
            let total: Result<Rational> = cursors
                .iter_mut()
                .enumerate()
                .try_fold(mix.remainder(), |acc, (i, c)| Ok(acc + mix.weight(i) * c.capital(&s)?));
            match (cursor.capital(&s), total) {
                (Ok(t), Ok(total)) => r.check(t == total, || format!("mixture capital {t} ≠ {total} at {s}")),
                (Err(e), _) | (_, Err(e)) => r.fail_with(e),
            }
        }
    }
    r
}

/// The temporal table used by the discount-adaptation checks: `{4/5}` at
/// lengths 2, 5 and 7 and `{1/2}` elsewhere.
pub fn band_leaving_table() -> ForecastingSystem {
    let inside = Interval::precise(rational(1, 2)).expect("1/2");
    let outside = Interval::precise(rational(4, 5)).expect("4/5");
    let entries = (0..8).map(|n| if [2, 5, 7].contains(&n) { outside.clone() } else { inside.clone() }).collect();
    ForecastingSystem::TemporalTable { entries, default: inside }
}

/// `discount_adapt` is exact on a stationary system, multiplies capital by
/// `(1/K)^{exits}` on the band-leaving table, and always yields a test
/// supermartingale for the system.
pub fn discount_adapt_suite(seed: u64, paths: usize, horizon: usize) -> SuiteResult {
    let mut r = SuiteResult::new("discount_adapt");
    let mut rng = SplitMix64::new(seed ^ 0xAD);
    let quarter = Interval::new(rational(1, 4), rational(3, 4)).expect("interval");
    let inner_spec = |rng: &mut SplitMix64| StrategySpec::FractionalExploit {
        direction: if rng.next_u64() >> 63 == 1 { Direction::Up } else { Direction::Down },
        interval: quarter.clone(),
        lambda: rational(1, 2),
    };
    let table = band_leaving_table();
    let stationary = ForecastingSystem::stationary(quarter.clone());
    for p in 0..paths {
        let inner = match inner_spec(&mut rng).build() {
            Ok(s) => s,
            Err(e) => {
                r.fail_with(e);
                continue;
            }
        };
        let path = random_situation(&mut rng, 0);
        let path = (0..horizon).fold(path, |mut s, _| {
            s.push(Outcome::from_bool(rng.next_u64() >> 63 == 1));
            s
        });
        let run = || -> Result<(bool, bool)> {
            let base = replay(inner.as_ref(), &path, CapitalMode::Exact, true)?;
            let base = base.exact().expect("exact mode").to_vec();
            let same = discount_adapt(
                inner.clone(),
                stationary.clone(),
                quarter.lo().clone(),
                quarter.hi().clone(),
                32,
            )?;
            let same_traj = replay(&same, &path, CapitalMode::Exact, true)?;
            let identical = same_traj.exact().expect("exact mode") == base.as_slice();

            let adapted =
                discount_adapt(inner.clone(), table.clone(), quarter.lo().clone(), quarter.hi().clone(), 32)?;
            // checks Ē ≤ 1 under the table at every node of the path
            let traj = replay(&adapted, &path, CapitalMode::Exact, true)?;
            let traj = traj.exact().expect("exact mode");
            let discount = rational(3, 4);
            let mut scaled = true;
            for (n, (t, b)) in traj.iter().zip(&base).enumerate() {
                let exits = [2usize, 5, 7].iter().filter(|&&k| k < n).count() as i32;
                scaled &= *t == b * num_traits::pow(discount.clone(), exits as usize);
            }
            Ok((identical, scaled))
        };
        match run() {
            Ok((identical, scaled)) => {
                r.check(identical, || format!("stationary adaptation changed the trajectory on path {p}"));
                r.check(scaled, || format!("table adaptation is not input×(3/4)^exits on path {p}"));
            }
            Err(e) => r.fail_with(e),
        }
    }
    r
}

/// The `{1/2}` registry strategies used by the greedy-bound checks.
pub fn half_registry_strategies() -> Vec<Arc<dyn BettingStrategy>> {
    let half = Interval::precise(rational(1, 2)).expect("1/2");
    let mut specs = vec![
        StrategySpec::Hold { interval: Some(half.clone()) },
        StrategySpec::DoubleOn { bit: Outcome::One },
        StrategySpec::DoubleOn { bit: Outcome::Zero },
        StrategySpec::AllInOn { bit: Outcome::One, interval: half.clone() },
        StrategySpec::AllInOn { bit: Outcome::Zero, interval: half.clone() },
        StrategySpec::FractionalExploit { direction: Direction::Up, interval: half.clone(), lambda: rational(1, 2) },
        StrategySpec::FractionalExploit { direction: Direction::Down, interval: half.clone(), lambda: rational(1, 2) },
        StrategySpec::OscillationTracker { system: ForecastingSystem::PhiHalf, lambda: rational(1, 2), precision: 32 },
        StrategySpec::Imitator {
            generator: Generator::Periodic { pattern: "0110".into() },
            lambda: rational(1, 2),
            interval: half.clone(),
        },
        StrategySpec::PseudoRandom { seed: 7, max_stake: rational(1, 2) },
        StrategySpec::DoubleOrHold { positions: PositionRule::PowersOfTwo },
    ];
    specs.push(StrategySpec::Mixture { components: specs[1..4].to_vec() });
    specs.push(StrategySpec::Gated {
        strategy: Box::new(specs[5].clone()),
        selection: crate::stochasticity::SelectionSpec::Parity { r: 0, m: 2 },
    });
    specs.into_iter().map(|s| s.build().expect("registry spec is valid")).collect()
}

/// Greedy paths keep every `{1/2}` registry strategy at or below 1.
pub fn greedy_suite(horizon: usize) -> SuiteResult {
    let mut r = SuiteResult::new("greedy bound");
    for strategy in half_registry_strategies() {
        match greedy_bounded_path(strategy.as_ref(), &Rational::one(), &Situation::empty(), horizon) {
            Ok(g) => r.check(g.bound_held, || {
                format!("{} exceeds 1 at step {:?}", strategy.name(), g.first_violation)
            }),
            Err(e) => r.fail_with(e),
        }
    }
    r
}

/// The diagonal construction keeps the weighted adversary sum at most 2.
pub fn diagonal_suite(seed: u64, stage_cap: usize) -> SuiteResult {
    let mut r = SuiteResult::new("diagonal bound");
    let quarter = Interval::new(rational(1, 4), rational(3, 4)).expect("interval");
    let target = StrategySpec::AllInOn { bit: Outcome::Zero, interval: quarter }.build().expect("valid spec");
    let double = StrategySpec::DoubleOn { bit: Outcome::One }.build().expect("valid spec");
    match diagonal_path(target.as_ref(), &[double], &[rational(2, 1), rational(5, 1)], stage_cap) {
        Ok((_, rep)) => {
            r.check(rep.milestones == vec![0, 3, 6], || format!("demo milestones {:?}", rep.milestones));
            r.check(rep.invariant_held, || "demo weighted sum exceeds 2".into());
        }
        Err(e) => r.fail_with(e),
    }
    let mut rng = SplitMix64::new(seed ^ 0xD1);
    for _ in 0..3 {
        let adversaries: Vec<_> = (0..5)
            .map(|_| {
                StrategySpec::PseudoRandom { seed: rng.next_u64(), max_stake: rational(1, 2) }
                    .build()
                    .expect("valid spec")
            })
            .collect();
        let target = StrategySpec::PseudoRandom { seed: rng.next_u64(), max_stake: rational(3, 4) }
            .build()
            .expect("valid spec");
        let milestones: Vec<_> = (1..=5).map(|k| rational(1 << k, 1)).collect();
        match diagonal_path(target.as_ref(), &adversaries, &milestones, stage_cap) {
            Ok((_, rep)) => r.check(rep.invariant_held, || "randomised weighted sum exceeds 2".into()),
            Err(e) => r.fail_with(e),
        }
    }
    r
}

/// A deliberately broken strategy (`d = (3/2, 3/2)` declared for `{1/2}`,
/// so `Ē = 3/2`) pushed through the replay audit; this suite must fail.
pub fn fault_injection_suite() -> SuiteResult {
    let mut r = SuiteResult::new("fault injection");
    let broken = ConstantStrategy {
        name: "injected_fault".into(),
        d: RationalGamble::new(rational(3, 2), rational(3, 2)),
        declared: Declared::half(),
    };
    match replay(&broken, &Situation::from_str_bits("0"), CapitalMode::Exact, true) {
        Ok(_) => r.check(true, String::new),
        Err(e) => r.check(false, || format!("injected_fault: {e}")),
    }
    r.check(validate_step(&Interval::precise(rational(1, 2)).expect("1/2"), &broken.d).unwrap_or(false), || {
        "injected_fault: Ē_{1/2}(3/2, 3/2) = 3/2 > 1".into()
    });
    r
}
