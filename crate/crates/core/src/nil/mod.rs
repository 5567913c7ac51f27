//! Concrete nilmanifolds: tori, skew products on `T²` and the Heisenberg
//! quotient `G/Γ`.
//!
//! Orbits are evaluated in closed form with exact reduction mod 1, never by
//! iterating floating-point group multiplication.

mod haar;
mod heisenberg;
mod system;

use thiserror::Error;

use crate::error::ErrorClass;

pub use haar::{
    equidistribution_report, haar_integral, haar_integral_translated, half_frequency_set,
    midpoint_rule, EquidistributionReport, HaarEstimate,
};
pub use heisenberg::HeisenbergElement;
pub use system::{
    nilsequence_eval, NilKind, NilsystemSpec, ObservableSpec, SkewMap, TrigTerm, BUMP_INTEGRAL,
    COMMUTE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NilError {
    #[error("invalid nilsystem: {0}")]
    InvalidSpec(String),
    #[error("translations {i} and {j} do not commute (defect {defect:e})")]
    NonCommuting { i: usize, j: usize, defect: f64 },
    #[error("expected {expected} orbit variables, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("work {work} exceeds the configured maximum {max}")]
    BudgetExceeded { work: u64, max: u64 },
    #[error("numerical overflow: {0}")]
    Overflow(String),
}

impl NilError {
    pub fn class(&self) -> ErrorClass {
        match self {
            NilError::BudgetExceeded { .. } => ErrorClass::Budget,
            NilError::Overflow(_) => ErrorClass::Numerical,
            _ => ErrorClass::Validation,
        }
    }
}
