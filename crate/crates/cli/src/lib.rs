//! Library half of the `irand` command: configuration, the subcommands,
//! and their reports. The binary only parses arguments and maps errors to
//! exit codes.

pub mod analyze;
pub mod config;
pub mod construct;
pub mod error;
pub mod generate;
pub mod output;
pub mod selftest;

pub use config::{ExperimentConfig, Overrides};
pub use error::{CliError, CliResult};
