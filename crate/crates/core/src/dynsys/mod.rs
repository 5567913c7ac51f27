//! Commuting affine unipotent maps on `T^m`, weighted multiple ergodic
//! averages and finite-horizon Host–Kra seminorms.
//!
//! Observables are trigonometric polynomials, so `f ∘ T^n` is computed in
//! frequency space and integrals are exact.

mod average;
mod matrix;
mod seminorm;
mod torus;

use thiserror::Error;

use crate::error::ErrorClass;
use crate::seqcore::SeqError;

pub use average::{
    cauchy_convergence_probe, correlation_sequence, weighted_multiple_average, AverageSpec,
    CauchyReport, WeightedAverage,
};
pub use matrix::{IntMatrix, FREQ_LIMIT};
pub use seminorm::{hk_seminorm, HkEstimate};
pub use torus::{
    compose_iterate, AffineMap, CommutingTorusSystem, GridFunction, PolynomialMapping,
    TorusObservable, COMMUTE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynError {
    #[error("frequency overflow: {0}")]
    FrequencyOverflow(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("maps {i} and {j} do not commute (defect {defect:e})")]
    NonCommuting { i: usize, j: usize, defect: f64 },
    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("work {work} exceeds the configured maximum {max}")]
    BudgetExceeded { work: u64, max: u64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

impl DynError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DynError::BudgetExceeded { .. } => ErrorClass::Budget,
            DynError::FrequencyOverflow(_) => ErrorClass::Numerical,
            DynError::Seq(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
