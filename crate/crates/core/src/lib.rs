//! Randomness analysis of finite binary sequences against interval-valued
//! forecasting systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] — outcomes, situations, interval forecasts, forecasting
//!   systems with a `2^-N` precision contract, growth functions.
//! * [`expectation`] — the upper-expectation calculus on binary gambles.
//! * [`martingale`] — betting strategies as multiplier processes, capital
//!   replay, mixtures, discount adaptation, finite-horizon verdicts.
//! * [`stochasticity`] — selection processes, Church statistics and the
//!   interval estimators.
//! * [`constructions`] — path sampling, capital-bounded greedy paths,
//!   diagonalisation and the double-or-hold pair.
//! * [`invariants`] — the exact invariant suites shared by the CLI
//!   `selftest` command and the test suite.
//!
//! The interval and gamble calculus is generic over [`Scalar`]; the
//! forecasting and betting layers are fixed to exact [`Rational`] values,
//! with `f64` log2 capital available for long horizons.

pub mod constructions;
pub mod error;
pub mod expectation;
pub mod invariants;
pub mod martingale;
pub mod model;
pub mod scalar;
pub mod stochasticity;

pub use error::{Error, Result};
pub use scalar::{rational, Scalar};

/// Exact rational numbers used throughout the forecasting and betting layers.
pub type Rational = num_rational::BigRational;

/// Interval forecast over exact rationals.
pub type Interval = model::IntervalForecast<Rational>;
/// Interval forecast over `f64`, for quick exploratory use.
pub type IntervalF64 = model::IntervalForecast<f64>;

/// Gamble over exact rationals.
pub type RationalGamble = expectation::Gamble<Rational>;
/// Gamble over `f64`.
pub type GambleF64 = expectation::Gamble<f64>;

/// Disclaimer attached to every verdict and estimate.
pub const FINITE_HORIZON_DISCLAIMER: &str =
    "finite-horizon evidence, not a randomness decision";
