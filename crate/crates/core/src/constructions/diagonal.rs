use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::martingale::{BettingStrategy, MultiplierEval};
use crate::model::{Outcome, Situation};
use crate::scalar::{add_fast, log2_rational, mul_fast};
use crate::{rational, Error, Rational, RationalGamble, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalReport {
    /// `n_0 = 0 < n_1 < …`: the length at which each milestone was reached.
    pub milestones: Vec<usize>,
    pub requested: usize,
    pub reached: usize,
    /// `Σ_k 2^{-n_k-k}·T_k(ω_{1:n})` over the adversaries entered by step
    /// `n`, for `n = 0..=|ω|`.
    #[serde(serialize_with = "ser_rationals")]
    pub weighted_sum: Vec<Rational>,
    /// log2 of the target capital `T*(ω_{1:n})`, for `n = 0..=|ω|`.
    #[serde(serialize_with = "crate::scalar::serialize_f64_seq")]
    pub target_log2: Vec<f64>,
    /// Exact target capital at each recorded milestone.
    #[serde(serialize_with = "ser_rationals")]
    pub target_at_milestones: Vec<Rational>,
    /// Whether `weighted_sum ≤ 2` held exactly at every step.
    pub invariant_held: bool,
    /// The stage that hit `stage_cap` before its milestone, if any.
    pub exhausted_stage: Option<usize>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&crate::scalar::format_rational(r))?;
    }
    seq.end()
}

struct Running<'a> {
    eval: Box<dyn MultiplierEval + 'a>,
    capital: Rational,
    /// `2^{-n_k-k}`
    weight: Rational,
    next: Option<RationalGamble>,
}

impl Running<'_> {
    fn multiplier(&mut self, s: &Situation) -> Result<&RationalGamble> {
        if self.next.is_none() {
            let d = self.eval.multiplier(s)?;
            if !d.is_nonneg() {
                return Err(Error::NotAMultiplier(d.to_string()));
            }
            self.next = Some(d);
        }
        Ok(self.next.as_ref().expect("just set"))
    }

    fn advance(&mut self, x: Outcome) {
        let d = self.next.take().expect("multiplier queried before advancing");
        let f = d.at(x);
        self.capital = mul_fast(&self.capital, f);
    }
}

fn enter<'a>(strategy: &'a dyn BettingStrategy, path: &Situation, weight: Rational) -> Result<Running<'a>> {
    let mut r = Running { eval: strategy.evaluator(), capital: Rational::one(), weight, next: None };
    let mut s = Situation::with_capacity(path.len());
    for x in path.iter() {
        r.multiplier(&s)?;
        r.advance(x);
        s.push(x);
    }
    Ok(r)
}

fn weighted(active: &[Running<'_>]) -> Rational {
    active.iter().fold(Rational::zero(), |acc, r| add_fast(&acc, &mul_fast(&r.weight, &r.capital)))
}

/// Diagonalisation in stages. Stage `i` extends the path greedily with
/// respect to `T'_i = Σ_{k≤i} 2^{-n_k-k}·T_k` (smaller next value wins,
/// ties to 0) until the target capital reaches `milestone_values[i]` at a
/// length beyond `n_i`; that length becomes `n_{i+1}` and adversary `i + 1`
/// enters with weight `2^{-n_{i+1}-i-1}`.
///
/// Adversaries are meant to be test supermartingales for `{1/2}`, which
/// makes `T'` non-increasing along the greedy path; the `≤ 2` invariant is
/// checked exactly at every step rather than assumed. A stage that needs
/// more than `stage_cap` steps ends the construction with a partial path.
pub fn diagonal_path(
    target: &dyn BettingStrategy,
    adversaries: &[Arc<dyn BettingStrategy>],
    milestone_values: &[Rational],
    stage_cap: usize,
) -> Result<(Situation, DiagonalReport)> {
    if milestone_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("milestone values must be strictly increasing".into()));
    }
    let two = rational(2, 1);
    let mut path = Situation::empty();
    let mut target_eval = target.evaluator();
    let mut target_capital = Rational::one();
    let mut active: Vec<Running<'_>> = Vec::new();
    let mut milestones = vec![0usize];
    let mut weighted_sum = Vec::new();
    let mut target_log2 = vec![0.0];
    let mut target_at_milestones = Vec::new();
    let mut exhausted_stage = None;

    let mut stage = 0usize;
    if let Some(adv) = adversaries.first() {
        active.push(enter(adv.as_ref(), &path, Rational::one())?);
    }
    weighted_sum.push(weighted(&active));

    'stages: while stage < milestone_values.len() {
        let goal = &milestone_values[stage];
        let stage_start = path.len();
        loop {
            if path.len() > stage_start && target_capital >= *goal {
                break;
            }
            if path.len() - stage_start >= stage_cap {
                exhausted_stage = Some(stage);
                break 'stages;
            }
            // greedy step on the weighted adversary sum
            let mut next = [Rational::zero(), Rational::zero()];
            for r in active.iter_mut() {
                let d = r.multiplier(&path)?.clone();
                let base = mul_fast(&r.weight, &r.capital);
                next[0] = add_fast(&next[0], &mul_fast(&base, &d.at0));
                next[1] = add_fast(&next[1], &mul_fast(&base, &d.at1));
            }
            let x = if next[1] < next[0] { Outcome::One } else { Outcome::Zero };
            let dt = target_eval.multiplier(&path)?;
            if !dt.is_nonneg() {
                return Err(Error::NotAMultiplier(dt.to_string()));
            }
            let f = dt.at(x);
            target_capital = mul_fast(&target_capital, f);
            for r in active.iter_mut() {
                r.advance(x);
            }
            path.push(x);
            weighted_sum.push(next[x as usize].clone());
            target_log2.push(log2_rational(&target_capital));
        }
        stage += 1;
        milestones.push(path.len());
        target_at_milestones.push(target_capital.clone());
        if let Some(adv) = adversaries.get(stage) {
            let weight = Rational::new(BigInt::one(), BigInt::one() << (path.len() + stage));
            active.push(enter(adv.as_ref(), &path, weight)?);
            // the new adversary's contribution is part of the sum from here on
            *weighted_sum.last_mut().expect("non-empty") = weighted(&active);
        }
    }
    let reached = milestones.len() - 1;
    let invariant_held = weighted_sum.iter().all(|w| *w <= two);
    Ok((
        path,
        DiagonalReport {
            milestones,
            requested: milestone_values.len(),
            reached,
            weighted_sum,
            target_log2,
            target_at_milestones,
            invariant_held,
            exhausted_stage,
        },
    ))
}
