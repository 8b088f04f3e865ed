//! Path generators and constructive procedures: sampling Reality,
//! capital-bounded greedy paths, diagonalisation against a list of
//! adversaries, and the synthetic double-or-hold pair.
//!
//! Every construction is sequential and deterministic given its inputs
//! (and seed, where one is taken).

mod diagonal;
mod double_or_hold;
mod greedy;
pub mod rng;
mod sample;

pub use diagonal::{diagonal_path, DiagonalReport};
pub use double_or_hold::double_or_hold_pair;
pub use greedy::{greedy_bounded_path, GreedyPath};
pub use rng::SplitMix64;
pub use sample::{sample_path, RealityPolicy};

pub use crate::stochasticity::is_double_or_hold;

use crate::model::Outcome;
use crate::RationalGamble;

/// The outcome with the smaller multiplier; exact ties go to 0.
pub(crate) fn cheaper_outcome(d: &RationalGamble) -> Outcome {
    if d.at1 < d.at0 {
        Outcome::One
    } else {
        Outcome::Zero
    }
}
