use std::sync::Arc;

use super::rng::SplitMix64;
use crate::martingale::{BettingStrategy, DoubleOrHold, PositionRule};
use crate::model::{Outcome, Situation};

/// A `{1/2}` strategy that doubles on 1 at designated lengths and holds
/// elsewhere, together with a path of fair-coin bits that is forced to 1
/// wherever the strategy doubles. The strategy's capital doubles at every
/// designated position along the path.
pub fn double_or_hold_pair(
    positions: PositionRule,
    horizon: usize,
    seed: u64,
) -> (Arc<dyn BettingStrategy>, Situation) {
    let mut path = Situation::with_capacity(horizon);
    for k in 0..horizon {
        let bit = positions.is_designated(k) || SplitMix64::at(seed, k as u64) >> 63 == 1;
        path.push(Outcome::from_bool(bit));
    }
    (Arc::new(DoubleOrHold::new(positions)), path)
}
