//! Hardy-field phases `e(f(n))` for sums of `t^a (log t)^e`, their Taylor
//! localization, level sets of `‖f(n)‖` and Fejér sandwiches of interval
//! indicators.

mod fejer;
mod function;
mod level;
mod localize;

use thiserror::Error;

use crate::error::ErrorClass;
use crate::seqcore::SeqError;

pub use fejer::{
    fejer_sandwich, fejer_sandwich_capped, sandwich_degree, Sandwich, TrigPolynomial,
    DEFAULT_DEGREE_CAP, GRID_FACTOR, SANDWICH_TOL,
};
pub use function::{
    hardy_deriv, hardy_eval, hardy_weight, HardyFunctionSpec, HardyTerm, PrecisionBudget,
    DD_REL_ERROR, DEFAULT_T0, MIN_FRACTIONAL_DIGITS,
};
pub use level::{
    hardy_sequence, hardy_weighted_average, level_set, weighted_decay_table, DecayRow, LevelSet,
};
pub use localize::{default_theta, taylor_localization, Localization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    #[error("t = {t} lies below the domain cutoff {t0}")]
    Domain { t: f64, t0: f64 },
    #[error("invalid Hardy function: {0}")]
    InvalidSpec(String),
    #[error("order {k} is too small, need at least {needed}")]
    OrderTooSmall { k: u32, needed: u32 },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u64, cap: u64 },
    #[error("horizon {horizon} leaves only {digits:.1} fractional digits")]
    PrecisionExhausted { horizon: u64, digits: f64 },
    #[error("work {work} exceeds the configured maximum {max}")]
    BudgetExceeded { work: u64, max: u64 },
    #[error("sandwich inequality fails at t = {t} by {gap:e}")]
    SandwichViolation { t: f64, gap: f64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

impl HardyError {
    pub fn class(&self) -> ErrorClass {
        match self {
            HardyError::DegreeCap { .. }
            | HardyError::PrecisionExhausted { .. }
            | HardyError::BudgetExceeded { .. } => ErrorClass::Budget,
            HardyError::SandwichViolation { .. } => ErrorClass::Numerical,
            HardyError::Seq(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
