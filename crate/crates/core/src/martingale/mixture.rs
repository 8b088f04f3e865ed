use std::sync::Arc;

use num_traits::{One, Zero};

use super::capital::CapitalCursor;
use super::strategy::{BettingStrategy, Declared, MultiplierEval};
use crate::model::{Outcome, Situation};
use crate::scalar::{add_fast, div_fast, mul_fast, pow2_neg};
use crate::{Error, Interval, Rational, RationalGamble, Result};

/// Finite mixture `T = Σ_{i<m} 2^{-i-1} T_i + 2^{-m}`; the remainder mass
/// sits on the hold strategy so that `T(□) = 1`.
#[derive(Debug, Clone)]
pub struct Mixture {
    components: Vec<Arc<dyn BettingStrategy>>,
    declared: Declared,
}

impl Mixture {
    pub fn components(&self) -> &[Arc<dyn BettingStrategy>] {
        &self.components
    }

    pub fn weight(&self, i: usize) -> Rational {
        pow2_neg(i as u32 + 1)
    }

    pub fn remainder(&self) -> Rational {
        pow2_neg(self.components.len() as u32)
    }
}

/// Builds the mixture of `strategies`; `m` must equal their number and all
/// must share one declaration. The empty mixture is the hold strategy,
/// declared for `[0, 1]`.
pub fn mixture(strategies: Vec<Arc<dyn BettingStrategy>>, m: usize) -> Result<Mixture> {
    if m != strategies.len() {
        return Err(Error::InvalidParameter(format!(
            "mixture count {m} does not match {} strategies",
            strategies.len()
        )));
    }
    let declared = match strategies.first() {
        None => Declared::Interval(Interval::vacuous()),
        Some(first) => {
            let d = first.declared().clone();
            if let Some(other) = strategies.iter().find(|s| s.declared() != &d) {
                return Err(Error::MismatchedDeclaration(format!(
                    "{} is declared for {d} but {} for {}",
                    first.name(),
                    other.name(),
                    other.declared()
                )));
            }
            d
        }
    };
    Ok(Mixture { components: strategies, declared })
}

struct MixtureEval<'a> {
    cursors: Vec<CapitalCursor<'a>>,
    weights: Vec<Rational>,
    remainder: Rational,
}

impl MultiplierEval for MixtureEval<'_> {
    fn multiplier(&mut self, s: &Situation) -> Result<RationalGamble> {
        let mut total = self.remainder.clone();
        let mut next = [self.remainder.clone(), self.remainder.clone()];
        for (cur, w) in self.cursors.iter_mut().zip(&self.weights) {
            let (t, d) = cur.capital_and_multiplier(s)?;
            if t.is_zero() {
                continue;
            }
            let wt = mul_fast(w, &t);
            for x in Outcome::BOTH {
                next[x as usize] = add_fast(&next[x as usize], &mul_fast(&wt, d.at(x)));
            }
            total = add_fast(&total, &wt);
        }
        let [n0, n1] = next;
        Ok(RationalGamble::new(div_fast(&n0, &total), div_fast(&n1, &total)))
    }
}

impl BettingStrategy for Mixture {
    fn name(&self) -> String {
        let names: Vec<String> = self.components.iter().map(|c| c.name()).collect();
        format!("mixture[{}]", names.join(","))
    }

    fn declared(&self) -> &Declared {
        &self.declared
    }

    fn evaluator(&self) -> Box<dyn MultiplierEval + '_> {
        Box::new(MixtureEval {
            cursors: self.components.iter().map(|c| CapitalCursor::new(c.as_ref())).collect(),
            weights: (0..self.components.len()).map(|i| self.weight(i)).collect(),
            remainder: if self.components.is_empty() {
                Rational::one()
            } else {
                self.remainder()
            },
        })
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{replay, CapitalMode, StrategySpec};
    use crate::rational;

    fn dbl(bit: Outcome) -> Arc<dyn BettingStrategy> {
        StrategySpec::DoubleOn { bit }.build().unwrap()
    }

    fn final_capital(s: &dyn BettingStrategy, bits: &str) -> Rational {
        let t = replay(s, &Situation::from_str_bits(bits), CapitalMode::Exact, true).unwrap();
        t.exact().unwrap().last().unwrap().clone()
    }

    #[test]
    fn single_component() {
        let m = mixture(vec![dbl(Outcome::One)], 1).unwrap();
        assert_eq!(final_capital(&m, "1"), rational(3, 2));
    }

    #[test]
    fn empty_mixture_is_hold() {
        let m = mixture(vec![], 0).unwrap();
        for bits in ["", "0", "0110"] {
            assert_eq!(final_capital(&m, bits), rational(1, 1));
        }
    }

    #[test]
    fn two_components() {
        let m = mixture(vec![dbl(Outcome::One), dbl(Outcome::Zero)], 2).unwrap();
        assert_eq!(final_capital(&m, "1"), rational(5, 4));
        // weighted-sum oracle over a longer path
        let path = "1101";
        let t0 = final_capital(dbl(Outcome::One).as_ref(), path);
        let t1 = final_capital(dbl(Outcome::Zero).as_ref(), path);
        let want = rational(1, 2) * t0 + rational(1, 4) * t1 + rational(1, 4);
        assert_eq!(final_capital(&m, path), want);
    }

    #[test]
    fn mismatched_declarations_are_rejected() {
        let i = Interval::new(rational(1, 4), rational(3, 4)).unwrap();
        let other = StrategySpec::AllInOn { bit: Outcome::Zero, interval: i }.build().unwrap();
        assert!(matches!(mixture(vec![dbl(Outcome::One), other], 2), Err(Error::MismatchedDeclaration(_))));
        assert!(mixture(vec![dbl(Outcome::One)], 2).is_err());
    }
}
