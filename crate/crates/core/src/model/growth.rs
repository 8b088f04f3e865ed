use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::scalar::{serde_rational, to_f64};
use crate::{Error, Rational, Result};

/// Non-decreasing, unbounded growth rate `τ` used by the computable
/// unboundedness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `τ(n) = a·n`, `a > 0`.
    Linear {
        #[serde(with = "serde_rational")]
        a: Rational,
    },
    /// `τ(n) = sqrt(n)`.
    Sqrt,
    /// `τ(n) = log2(n + 1)`.
    Log2,
    /// Listed values, continued with slope 1 past the end.
    Table { values: Vec<TableValue> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TableValue(#[serde(with = "serde_rational")] pub Rational);

impl GrowthFunction {
    pub fn linear(a: Rational) -> Result<Self> {
        if !a.is_positive() {
            return Err(Error::InvalidParameter("linear growth needs a > 0".into()));
        }
        Ok(Self::Linear { a })
    }

    pub fn table(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() || values[0].is_negative() || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "growth table must be non-empty, non-negative and non-decreasing".into(),
            ));
        }
        Ok(Self::Table { values: values.into_iter().map(TableValue).collect() })
    }

    /// Exact `τ(n)` where it is rational.
    pub fn exact(&self, n: u64) -> Option<Rational> {
        match self {
            Self::Linear { a } => Some(a * Rational::from_integer(BigInt::from(n))),
            Self::Table { values } => Some(match values.get(n as usize) {
                Some(v) => v.0.clone(),
                None => {
                    let last = &values.last().expect("non-empty table").0;
                    last + Rational::from_integer(BigInt::from(n + 1 - values.len() as u64))
                }
            }),
            Self::Sqrt | Self::Log2 => None,
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        match self {
            Self::Sqrt => (n as f64).sqrt(),
            Self::Log2 => ((n + 1) as f64).log2(),
            _ => to_f64(&self.exact(n).expect("rational rule")),
        }
    }

    /// `capital ≥ τ(n)`, exact except for the `log2` rule at non-powers of two.
    pub fn is_met_by(&self, n: u64, capital: &Rational) -> bool {
        match self {
            Self::Sqrt => {
                !capital.is_negative() && capital * capital >= Rational::from_integer(BigInt::from(n))
            }
            Self::Log2 => {
                let m = n + 1;
                if m.is_power_of_two() {
                    *capital >= Rational::from_integer(BigInt::from(m.trailing_zeros()))
                } else {
                    to_f64(capital) >= self.eval(n)
                }
            }
            _ => *capital >= self.exact(n).expect("rational rule"),
        }
    }

    /// `2^{log2_capital} ≥ τ(n)`, evaluated in the log domain.
    pub fn is_met_by_log2(&self, n: u64, log2_capital: f64) -> bool {
        let tau = self.eval(n);
        if tau <= 0.0 {
            return true;
        }
        log2_capital >= tau.log2()
    }

    pub fn name(&self) -> String {
        match self {
            Self::Linear { a } => format!("linear({a})"),
            Self::Sqrt => "sqrt".into(),
            Self::Log2 => "log2".into(),
            Self::Table { values } => format!("table({} values)", values.len()),
        }
    }
}

impl Default for GrowthFunction {
    fn default() -> Self {
        Self::Log2
    }
}
