//! Prime-factor sieves, multiplicative functions and the arithmetic sets
//! `S_{a,b}`, with pretentious distances, progression averages and prime
//! dilation correlations.

mod katai;
mod mult;
mod pretentious;
mod progressions;
mod sab;
mod sieve;

use thiserror::Error;

use crate::error::ErrorClass;
use crate::seqcore::SeqError;

pub use katai::{katai_correlation, katai_grid, KataiEntry, KataiGrid};
pub use mult::{
    mult_eval, mult_eval_multi, root_of_unity, DirichletCharacterSpec, MultiplicativeFunctionSpec,
    UNIT_TOL,
};
pub use pretentious::{
    d_distance_partial, d_distance_profile, d_distance_twisted, two_adic_check, unimodular_partial,
    DDistance, DDistanceProfile, TwoAdicCheck,
};
pub use progressions::{
    ap_average, aperiodicity_scan, decay_trend, twisted_average, ApEntry, ApScan, DecayTrend,
};
pub use sab::{
    key_identity_eval, key_identity_eval_counting, s_ab_density, s_ab_density_counting,
    s_ab_density_multi, s_ab_indicator, s_ab_indicator_counting, SabDensity,
};
pub use sieve::{segmented_omega, Counting, FactorSieve, DEFAULT_SIEVE_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("{n} is beyond the sieve limit {limit}")]
    SieveRange { n: u64, limit: u64 },
    #[error("sieve of size {requested} exceeds the cap {cap}; use segmented counts")]
    SieveTooLarge { requested: u64, cap: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("primes {primes:?} are not pairwise distinct")]
    PrimeClash { primes: [u64; 4] },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("|phi({p}^{k})| = {modulus} exceeds 1")]
    NotBounded { p: u64, k: u32, modulus: f64 },
    #[error("invalid character: {0}")]
    InvalidCharacter(String),
    #[error("sieve cache: {0}")]
    Cache(String),
    #[error("work {work} exceeds the configured maximum {max}")]
    BudgetExceeded { work: u64, max: u64 },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

impl ArithError {
    pub fn class(&self) -> ErrorClass {
        match self {
            ArithError::SieveTooLarge { .. } | ArithError::BudgetExceeded { .. } => ErrorClass::Budget,
            ArithError::NotBounded { .. } => ErrorClass::Numerical,
            ArithError::Seq(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
