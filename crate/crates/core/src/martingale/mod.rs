//! Betting strategies as multiplier processes.
//!
//! A strategy supplies, in every situation `s`, a non-negative multiplier
//! gamble `D(s)`; the capital it generates is `T(s) = ∏_k D(s_{1:k})(s_{k+1})`
//! with `T(□) = 1`. It is a test supermartingale for a forecasting system
//! `φ` exactly when `Ē_{φ(s)}(D(s)) ≤ 1` in every situation, which is what
//! [`validate_step`] checks one step at a time.

mod adapt;
mod capital;
mod mixture;
mod process;
pub(crate) mod registry;
mod strategy;
mod verdict;

pub use adapt::{discount_adapt, DiscountAdapted};
pub use capital::{
    replay, validate_declared, validate_step, CapitalCursor, CapitalMode, CapitalTrajectory,
};
pub use mixture::{mixture, Mixture};
pub use process::{difference_of, multiplier_of, ProcessStrategy, TreeProcess};
pub use registry::{strategy_registry, Direction, Generator, PositionRule, StrategySpec};
pub use strategy::{
    gate_by_selection, BettingStrategy, ConstantStrategy, Declared, DoubleOrHold, Gated, Imitator,
    MultiplierEval, OscillationTracker, PseudoRandom, PureStrategy,
};
pub use verdict::{schnorr_verdict, unbounded_verdict, SchnorrReport, UnboundedReport};
