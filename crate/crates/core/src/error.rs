use thiserror::Error;

use crate::{arith::ArithError, decomp::DecompError, dynsys::DynError, hardy::HardyError};
use crate::{nil::NilError, seqcore::SeqError};

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: wrong arity, out-of-range parameters, malformed specs.
    Validation,
    /// A configured work or memory cap would be exceeded.
    Budget,
    /// A numerical invariant was violated at run time.
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Nil(#[from] NilError),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Seq(e) => e.class(),
            Error::Nil(e) => e.class(),
            Error::Dyn(e) => e.class(),
            Error::Arith(e) => e.class(),
            Error::Hardy(e) => e.class(),
            Error::Decomp(e) => e.class(),
        }
    }
}
