//! Binary sequences, interval forecasts and forecasting systems.

mod forecast;
mod growth;
mod interval;
pub mod reals;
mod situation;

pub use forecast::{ForecastView, ForecastingSystem};
pub use growth::GrowthFunction;
pub use interval::IntervalForecast;
pub use situation::{parse_bits, to_bits_string, Outcome, SequencePrefix, Situation};
