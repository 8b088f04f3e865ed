use std::path::PathBuf;

/// Failures surfaced by the command-line front end, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or unparseable input data.
    #[error("input {path}: {message}")]
    Input { path: PathBuf, message: String },

    /// Invalid configuration, with the offending field where known.
    #[error("config: {0}")]
    Config(String),

    /// An exactly-checked invariant failed, or the library reported an
    /// error that valid configurations cannot produce.
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Config(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn config(field: &str, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{field}: {err}"))
    }

    pub fn internal(err: impl std::fmt::Display) -> Self {
        CliError::Internal(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
