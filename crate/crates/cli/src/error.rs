use ergolab::ErrorClass;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] ergolab::Error),
    /// Partial results to attach to the diagnostic.
    #[error("{error}")]
    WithDetails { error: Box<CliError>, details: serde_json::Value },
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            CliError::Core(e) => e.class(),
            CliError::WithDetails { error, .. } => error.class(),
            _ => ErrorClass::Validation,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Validation => 2,
            ErrorClass::Budget => 3,
            ErrorClass::Numerical => 4,
        }
    }
}

macro_rules! core_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        })*
    };
}

core_from!(
    ergolab::seqcore::SeqError,
    ergolab::nil::NilError,
    ergolab::dynsys::DynError,
    ergolab::arith::ArithError,
    ergolab::hardy::HardyError,
    ergolab::decomp::DecompError
);

pub type Result<T> = std::result::Result<T, CliError>;
