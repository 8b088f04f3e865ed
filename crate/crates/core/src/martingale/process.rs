use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::strategy::{Declared, PureStrategy};
use crate::constructions::rng::SplitMix64;
use crate::model::{Outcome, Situation};
use crate::{Error, Rational, RationalGamble, Result};

/// `D_M(s)(x) = M(sx) / M(s)` for a positive parent value.
pub fn multiplier_of(parent: &Rational, child0: &Rational, child1: &Rational) -> Result<RationalGamble> {
    if !parent.is_positive() {
        return Err(Error::InvalidParameter(format!("multiplier of a non-positive value {parent}")));
    }
    Ok(RationalGamble::new(child0 / parent, child1 / parent))
}

/// `ΔM(s)(x) = M(sx) − M(s)`.
pub fn difference_of(parent: &Rational, child0: &Rational, child1: &Rational) -> RationalGamble {
    RationalGamble::new(child0 - parent, child1 - parent)
}

/// A real process on the full binary tree up to a fixed depth, stored in
/// breadth-first order: node `s` lives at `2^{|s|} − 1 + bits(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeProcess {
    depth: usize,
    values: Vec<Rational>,
}

impl TreeProcess {
    pub fn new(depth: usize, values: Vec<Rational>) -> Result<Self> {
        if values.len() != (1usize << (depth + 1)) - 1 {
            return Err(Error::InvalidParameter(format!(
                "a depth-{depth} tree has {} nodes, got {}",
                (1usize << (depth + 1)) - 1,
                values.len()
            )));
        }
        Ok(Self { depth, values })
    }

    /// Positive values `a/b` with `a ∈ [1, max_num]`, `b ∈ [1, max_den]`.
    pub fn random(depth: usize, rng: &mut SplitMix64, max_num: u64, max_den: u64) -> Self {
        let values = (0..(1usize << (depth + 1)) - 1)
            .map(|_| {
                let a = 1 + rng.below(max_num);
                let b = 1 + rng.below(max_den);
                Rational::new(BigInt::from(a), BigInt::from(b))
            })
            .collect();
        Self { depth, values }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn index(s: &Situation) -> usize {
        let bits = s.iter().fold(0usize, |acc, x| (acc << 1) | x as usize);
        (1usize << s.len()) - 1 + bits
    }

    pub fn value(&self, s: &Situation) -> Option<&Rational> {
        if s.len() > self.depth {
            return None;
        }
        self.values.get(Self::index(s))
    }

    /// All situations of length below the depth, i.e. nodes with children.
    pub fn inner_nodes(&self) -> impl Iterator<Item = Situation> + '_ {
        (0..self.depth).flat_map(|len| {
            (0..1usize << len).map(move |bits| {
                Situation::from_outcomes((0..len).rev().map(|k| Outcome::from_bool((bits >> k) & 1 == 1)))
            })
        })
    }

    pub fn children(&self, s: &Situation) -> Option<(&Rational, &Rational)> {
        Some((self.value(&s.child(Outcome::Zero))?, self.value(&s.child(Outcome::One))?))
    }
}

/// The strategy whose multipliers are `D_M` for a tree process `M`;
/// beyond the tree's depth it holds.
#[derive(Debug, Clone)]
pub struct ProcessStrategy {
    pub process: TreeProcess,
    pub declared: Declared,
}

impl PureStrategy for ProcessStrategy {
    fn name(&self) -> String {
        format!("process(depth {})", self.process.depth)
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn multiplier_at(&self, s: &Situation) -> Result<RationalGamble> {
        let parent = match self.process.value(s) {
            Some(p) if s.len() < self.process.depth => p,
            _ => return Ok(RationalGamble::hold()),
        };
        if parent.is_zero() {
            return Ok(RationalGamble::hold());
        }
        let (c0, c1) = self.process.children(s).expect("inner node");
        multiplier_of(parent, c0, c1)
    }
}
