use crate::model::Situation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at byte offset {offset}: unexpected {found:?}")]
    Parse { offset: usize, found: char },

    #[error("invalid interval forecast [{lo}, {hi}]")]
    InvalidInterval { lo: String, hi: String },

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unbounded payoff direction: interval [{lo}, {hi}] is degenerate at an endpoint")]
    UnboundedPayoff { lo: String, hi: String },

    #[error("not a multiplier: {0} has a negative component")]
    NotAMultiplier(String),

    #[error("band exceeds declared interval: {0}")]
    BandExceedsInterval(String),

    #[error("situation of length {len} lies outside the domain of {system}")]
    OutOfDomain { system: String, len: usize },

    #[error("mismatched declarations: {0}")]
    MismatchedDeclaration(String),

    #[error("validity check failed at situation {situation}: {inequality}")]
    CheckFailed { situation: Situation, inequality: String },

    #[error("not double-or-hold at situation {0}")]
    NotDoubleOrHold(Situation),

    #[error("unknown registry entry {0:?}")]
    UnknownName(String),

    #[error("insufficient selection coverage: no selection fired at least {min_count} times")]
    InsufficientCoverage { min_count: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
