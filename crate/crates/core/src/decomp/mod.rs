//! Structured-plus-uniform splitting `a = a_st + a_err` by greedy fitting
//! against a dictionary of linear phases, quadratic phases and nilsequences.

mod dictionary;
mod fit;

use thiserror::Error;

use crate::error::ErrorClass;
use crate::seqcore::SeqError;

pub use dictionary::{farey_fractions, Atom, AtomKind, NilDictionary};
pub use fit::{
    fit_structured, residual_uniformity, DecompositionReport, FitMetrics, FitSummary,
    SelectedAtom, StopReason, UniformityMetric, MAX_GRAM_CONDITION,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
    #[error("duplicate atom: {0}")]
    DuplicateAtom(String),
    #[error("work {work} exceeds budget {max}")]
    BudgetExceeded { work: u64, max: u64 },
    #[error("Gram matrix condition {condition:.3e} exceeds the limit; {} atoms kept", partial.atoms.len())]
    GramIllConditioned { condition: f64, partial: Box<FitSummary> },
    #[error("window sides {sides:?} are shorter than N_wrap = {n_wrap}")]
    WindowTooSmall { sides: Vec<u64>, n_wrap: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

impl DecompError {
    pub fn class(&self) -> ErrorClass {
        match self {
            DecompError::BudgetExceeded { .. } => ErrorClass::Budget,
            DecompError::GramIllConditioned { .. } | DecompError::Numerical(_) => ErrorClass::Numerical,
            DecompError::Seq(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
