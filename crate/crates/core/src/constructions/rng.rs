//! SplitMix64: a fixed, documented 64-bit mixing generator, so that every
//! sampled path is identical across platforms and releases.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::model::Situation;
use crate::Rational;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// The `k`-th output (0-based) of `SplitMix64::new(seed)`, in O(1).
    pub fn at(seed: u64, k: u64) -> u64 {
        mix(seed.wrapping_add(GAMMA.wrapping_mul(k.wrapping_add(1))))
    }

    /// Deterministic 64-bit hash of `(seed, s)`; distinct lengths of the
    /// same bits hash differently.
    pub fn hash_situation(seed: u64, s: &Situation) -> u64 {
        let mut h = mix(seed ^ GAMMA.wrapping_mul(s.len() as u64 + 1));
        for w in s.words() {
            h = mix(h.wrapping_add(GAMMA) ^ w);
        }
        h
    }

    /// Uniform integer in `0..n` (Lemire's multiply-shift with rejection).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform `k / 2^53` in `[0, 1)`.
    pub fn unit_53(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draws `1` with probability `p` rounded to the `2^-53` grid, decided
    /// exactly: `u < p·2^53` for a uniform 53-bit `u`.
    pub fn bernoulli(&mut self, p: &Rational) -> bool {
        let u = self.next_u64() >> 11;
        let (num, den) = (p.numer(), p.denom());
        if let (Some(n), Some(d)) = (num.to_u128(), den.to_u128()) {
            if n.leading_zeros() > 54 && d.leading_zeros() > 54 {
                return (u as u128) * d < n << 53;
            }
        }
        BigInt::from(u) * den < num.clone() << 53
    }
}
