use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::registry::{Generator, PositionRule};
use crate::constructions::rng::SplitMix64;
use crate::model::{ForecastingSystem, Outcome, Situation};
use crate::stochasticity::{SelectionEval, SelectionProcess};
use crate::{rational, Interval, Rational, RationalGamble, Result};

/// What a strategy claims to be a test supermartingale for.
#[derive(Debug, Clone, PartialEq)]
pub enum Declared {
    Interval(Interval),
    System { system: ForecastingSystem, precision: u32 },
}

impl Declared {
    pub fn half() -> Self {
        Declared::Interval(Interval::precise(rational(1, 2)).expect("1/2 is a probability"))
    }

    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Declared::Interval(i) => Some(i),
            Declared::System { .. } => None,
        }
    }
}

impl fmt::Display for Declared {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Declared::Interval(i) => write!(f, "{i}"),
            Declared::System { system, precision } => write!(f, "{}@{precision}", system.name()),
        }
    }
}

/// Per-replay evaluator. May carry state between calls; callers own one
/// evaluator per pass.
pub trait MultiplierEval {
    fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble>;
}

pub trait BettingStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn declared(&self) -> &Declared;
    fn evaluator(&self) -> Box<dyn MultiplierEval + '_>;
}

/// Strategies whose multiplier is a pure function of the situation.
pub trait PureStrategy: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn declared(&self) -> &Declared;
    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble>;
}

struct PureEval<'a, T: ?Sized>(&'a T);

impl<T: PureStrategy + ?Sized> MultiplierEval for PureEval<'_, T> {
    fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble> {
        self.0.multiplier_at(s)
    }
}

impl<T: PureStrategy> BettingStrategy for T {
    fn name(&self) -> String {
        PureStrategy::name(self)
    }

    fn declared(&self) -> &Declared {
        PureStrategy::declared(self)
    }

    fn evaluator(&self) -> Box<dyn MultiplierEval + '_> {
        Box::new(PureEval(self))
    }
}

/// The same multiplier in every situation. Covers hold, double-on,
/// all-in-on and the fractional exploiters.
#[derive(Debug, Clone)]
pub struct ConstantStrategy {
    pub name: String,
    pub d: RationalGamble,
    pub declared: Declared,
}

impl PureStrategy for ConstantStrategy {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, _: &Situation) -> Result<RationalGamble> {
        Ok(self.d.clone())
    }
}

/// Bets toward the side the forecast leans to, staking the fraction
/// `λ·2|m − 1/2|` of capital where `m` is the midpoint of the `N`-bit
/// forecast. Multipliers `(1 ∓ f, 1 ± f)` have fair-coin expectation 1.
#[derive(Debug, Clone)]
pub struct OscillationTracker {
    pub system: ForecastingSystem,
    pub lambda: Rational,
    pub precision: u32,
    pub declared: Declared,
}

impl PureStrategy for OscillationTracker {
    fn name(&self) -> String {
        format!("oscillation_tracker({},{},{})", self.system.name(), self.lambda, self.precision)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble> {
        let (lo, hi) = self.system.forecast_at(s, self.precision)?;
        let lean = (lo + hi) / rational(2, 1) - rational(1, 2);
        let mut stake = &self.lambda * lean.abs() * rational(2, 1);
        if stake > Rational::one() {
            stake = Rational::one();
        }
        let up = Rational::one() + &stake;
        let down = Rational::one() - &stake;
        Ok(if lean.is_positive() { RationalGamble::new(down, up) } else { RationalGamble::new(up, down) })
    }
}

/// Predicts the next bit with a deterministic generator and stakes the
/// fraction `λ` on it at the payoff the declared interval allows.
#[derive(Debug, Clone)]
pub struct Imitator {
    pub generator: Generator,
    pub lambda: Rational,
    pub declared: Declared,
    up: RationalGamble,
    down: RationalGamble,
}

impl Imitator {
    pub(super) fn new(generator: Generator, lambda: Rational, interval: Interval) -> Self {
        let up = super::registry::fractional_up(&interval, &lambda);
        let down = super::registry::fractional_down(&interval, &lambda);
        Self { generator, lambda, declared: Declared::Interval(interval), up, down }
    }
}

impl PureStrategy for Imitator {
    fn name(&self) -> String {
        format!("imitator({:?},{})", self.generator, self.lambda)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble> {
        Ok(match self.generator.bit(s.len() as u64) {
            Outcome::One => self.up.clone(),
            Outcome::Zero => self.down.clone(),
        })
    }
}

/// Fair-coin strategy with a situation-keyed pseudo-random stake
/// `a ∈ [0, max_stake)` on a pseudo-random side: `(1 ∓ a, 1 ± a)`.
#[derive(Debug, Clone)]
pub struct PseudoRandom {
    pub seed: u64,
    pub max_stake: Rational,
    pub declared: Declared,
}

impl PureStrategy for PseudoRandom {
    fn name(&self) -> String {
        format!("pseudo_random({},{})", self.seed, self.max_stake)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble> {
        let h = SplitMix64::hash_situation(self.seed, s);
        let stake = &self.max_stake * rational((h & 0xffff) as i64, 1 << 16);
        let up = Rational::one() + &stake;
        let down = Rational::one() - &stake;
        Ok(if h >> 63 == 1 { RationalGamble::new(down, up) } else { RationalGamble::new(up, down) })
    }
}

/// Doubles on outcome 1 at designated situation lengths and holds elsewhere.
#[derive(Debug, Clone)]
pub struct DoubleOrHold {
    pub positions: PositionRule,
    pub declared: Declared,
}

impl DoubleOrHold {
    pub fn new(positions: PositionRule) -> Self {
        Self { positions, declared: Declared::half() }
    }
}

impl PureStrategy for DoubleOrHold {
    fn name(&self) -> String {
        format!("double_or_hold({:?})", self.positions)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble> {
        Ok(if self.positions.is_designated(s.len()) {
            RationalGamble::new(Rational::zero(), rational(2, 1))
        } else {
            RationalGamble::hold()
        })
    }
}

/// Bets like `inner` where the selection fires and holds elsewhere.
#[derive(Debug, Clone)]
pub struct Gated {
    pub inner: Arc<dyn BettingStrategy>,
    pub selection: Arc<dyn SelectionProcess>,
}

struct GatedEval<'a> {
    inner: Box<dyn MultiplierEval + 'a>,
    selection: Box<dyn SelectionEval + 'a>,
}

impl MultiplierEval for GatedEval<'_> {
    fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble> {
        if self.selection.select(s)? {
            self.inner.multiplier(s)
        } else {
            Ok(RationalGamble::hold())
        }
    }
}

impl BettingStrategy for Gated {
    fn name(&self) -> String {
        format!("gated({},{})", self.inner.name(), self.selection.name())
    }

    fn declared(&self) -> &Declared {
        self.inner.declared()
    }

    fn evaluator(&self) -> Box<dyn MultiplierEval + '_> {
        Box::new(GatedEval { inner: self.inner.evaluator(), selection: self.selection.evaluator() })
    }
}

pub fn gate_by_selection(strategy: Arc<dyn BettingStrategy>, selection: Arc<dyn SelectionProcess>) -> Gated {
    Gated { inner: strategy, selection }
}
