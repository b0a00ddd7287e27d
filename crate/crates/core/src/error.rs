use num_bigint::BigUint;
use thiserror::Error;

use crate::model::MixedProfile;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid cost function: {0}")]
    InvalidCost(String),

    #[error("{operation} requires {assumption}")]
    AssumptionViolated {
        operation: &'static str,
        assumption: &'static str,
    },

    #[error("candidate space of {required} exceeds the enumeration budget of {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },

    #[error("best-response dynamics did not settle within {steps} improvement steps")]
    IterationBudgetExceeded { steps: u64 },

    #[error("solver stopped after {iterations} iterations with Wardrop gap {gap:e}")]
    NonConvergence {
        iterations: u64,
        gap: f64,
        best: Box<MixedProfile>,
    },

    #[error("solution routes disagree by {difference:e} (tolerance {tolerance:e})")]
    RouteMismatch { difference: f64, tolerance: f64 },

    #[error("invariance condition violated: {0}")]
    ConditionViolated(String),

    #[error("positivity certificate failed: {0}")]
    CertificateFailed(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
