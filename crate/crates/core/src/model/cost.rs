//! Per-slot grid cost functions and user pricing functions.
//!
//! A [`GridCostFunction`] maps the total transformer load of one slot to a
//! physical cost. Only strictly increasing, continuous functions can be built,
//! so every value satisfies assumption A1. Convexity (A2) is reported by
//! [`GridCostFunction::satisfies_a2`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest integer magnitude an `f64` coefficient may have to be treated as exact.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    /// `coefficient * L^exponent`
    Monomial { coefficient: f64, exponent: f64 },
    /// `sqrt(L)`
    Sqrt,
    Sum(Vec<GridCostFunction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCostFunction {
    term: Term,
}

impl GridCostFunction {
    pub fn monomial(coefficient: f64, exponent: f64) -> Result<Self> {
        if !(coefficient.is_finite() && coefficient > 0.0) {
            return Err(Error::InvalidCost(format!(
                "monomial coefficient must be positive and finite, got {coefficient}"
            )));
        }
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidCost(format!(
                "monomial exponent must be positive and finite, got {exponent}"
            )));
        }
        Ok(Self {
            term: Term::Monomial {
                coefficient,
                exponent,
            },
        })
    }

    /// `L^k` with unit coefficient.
    pub fn power(exponent: f64) -> Result<Self> {
        Self::monomial(1.0, exponent)
    }

    /// Joule losses `L^2`.
    pub fn quadratic() -> Self {
        Self::power(2.0).expect("valid exponent")
    }

    pub fn sqrt() -> Self {
        Self { term: Term::Sqrt }
    }

    pub fn sum(terms: Vec<GridCostFunction>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidCost("sum of zero terms".into()));
        }
        Ok(Self {
            term: Term::Sum(terms),
        })
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    /// Continuous and strictly increasing on `L >= 0`. Holds for every constructible value.
    pub fn satisfies_a1(&self) -> bool {
        true
    }

    /// Continuously differentiable and strictly convex.
    pub fn satisfies_a2(&self) -> bool {
        match &self.term {
            Term::Monomial { exponent, .. } => *exponent > 1.0,
            Term::Sqrt => false,
            Term::Sum(terms) => terms.iter().all(Self::satisfies_a2),
        }
    }

    pub fn eval(&self, load: f64) -> f64 {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => coefficient * pow(load, *exponent),
            Term::Sqrt => load.sqrt(),
            Term::Sum(terms) => terms.iter().map(|t| t.eval(load)).sum(),
        }
    }

    /// First derivative at `load`. May be infinite at zero for exponents below one.
    pub fn derivative_at(&self, load: f64) -> f64 {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => coefficient * exponent * pow(load, exponent - 1.0),
            Term::Sqrt => 0.5 / load.sqrt(),
            Term::Sum(terms) => terms.iter().map(|t| t.derivative_at(load)).sum(),
        }
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self, load: f64) -> f64 {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => coefficient * pow(load, exponent + 1.0) / (exponent + 1.0),
            Term::Sqrt => 2.0 / 3.0 * load * load.sqrt(),
            Term::Sum(terms) => terms.iter().map(|t| t.antiderivative(load)).sum(),
        }
    }

    /// The derivative as a cost function of its own; requires A2 so the
    /// result is again strictly increasing.
    pub fn derivative(&self) -> Option<GridCostFunction> {
        if !self.satisfies_a2() {
            return None;
        }
        let term = match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => Term::Monomial {
                coefficient: coefficient * exponent,
                exponent: exponent - 1.0,
            },
            Term::Sqrt => unreachable!("sqrt is not strictly convex"),
            Term::Sum(terms) => Term::Sum(
                terms
                    .iter()
                    .map(|t| t.derivative())
                    .collect::<Option<Vec<_>>>()?,
            ),
        };
        Some(Self { term })
    }

    /// The function `y -> f(scale * y)`.
    pub fn with_scaled_argument(&self, scale: f64) -> GridCostFunction {
        let term = match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => Term::Monomial {
                coefficient: coefficient * pow(scale, *exponent),
                exponent: *exponent,
            },
            Term::Sqrt if scale == 1.0 => Term::Sqrt,
            Term::Sqrt => Term::Monomial {
                coefficient: scale.sqrt(),
                exponent: 0.5,
            },
            Term::Sum(terms) => Term::Sum(
                terms
                    .iter()
                    .map(|t| t.with_scaled_argument(scale))
                    .collect(),
            ),
        };
        Self { term }
    }

    /// True when every term is an integer-coefficient, integer-exponent monomial.
    pub fn is_integral(&self) -> bool {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => is_exact_integer(*coefficient) && is_exact_integer(*exponent),
            Term::Sqrt => false,
            Term::Sum(terms) => terms.iter().all(Self::is_integral),
        }
    }

    /// Exact evaluation at an integer load, available when [`Self::is_integral`].
    pub fn eval_exact(&self, load: &BigInt) -> Option<BigInt> {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => {
                if !(is_exact_integer(*coefficient) && is_exact_integer(*exponent)) {
                    return None;
                }
                let k = exponent.to_u32()?;
                let c = BigInt::from(coefficient.to_i64()?);
                Some(c * load.pow(k))
            }
            Term::Sqrt => None,
            Term::Sum(terms) => terms
                .iter()
                .try_fold(BigInt::zero(), |acc, t| Some(acc + t.eval_exact(load)?)),
        }
    }
}

impl fmt::Display for GridCostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.term {
            Term::Monomial {
                coefficient,
                exponent,
            } => {
                if *coefficient != 1.0 {
                    write!(f, "{coefficient}*")?;
                }
                write!(f, "L^{exponent}")
            }
            Term::Sqrt => write!(f, "sqrt(L)"),
            Term::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

fn is_exact_integer(x: f64) -> bool {
    x.is_finite() && x.fract() == 0.0 && x.abs() < EXACT_LIMIT
}

fn pow(base: f64, exponent: f64) -> f64 {
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    }
}

/// Strictly increasing map from a player's summed grid cost to the cost it perceives.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum PricingFunction {
    #[default]
    Identity,
    /// `scale * x + offset`, `scale > 0`
    Affine { scale: f64, offset: f64 },
    /// `exp(rate * x)`, `rate > 0`
    Exp { rate: f64 },
}

impl PricingFunction {
    pub fn affine(scale: f64, offset: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0 && offset.is_finite()) {
            return Err(Error::InvalidCost(format!(
                "affine pricing needs a positive finite scale, got {scale}"
            )));
        }
        Ok(Self::Affine { scale, offset })
    }

    pub fn exp(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidCost(format!(
                "exponential pricing needs a positive rate, got {rate}"
            )));
        }
        Ok(Self::Exp { rate })
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity)
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::Identity => x,
            Self::Affine { scale, offset } => scale * x + offset,
            Self::Exp { rate } => (rate * x).exp(),
        }
    }
}
