//! Command failures and their exit codes.

use thiserror::Error;

/// Why a command stopped, mapped one-to-one onto exit codes.
#[derive(Debug, Error, PartialEq)]
pub enum Failure {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("precision cap: {0}")]
    PrecisionCap(String),
    #[error("persistence: {0}")]
    Persistence(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::PrecisionCap(_) => 4,
            Failure::Persistence(_) => 5,
        }
    }

    /// Classifies an error raised while checking inputs.
    pub fn from_input(e: diwt::Error) -> Self {
        match e {
            diwt::Error::PrecisionBudgetExceeded { .. } => Failure::PrecisionCap(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }

    /// Classifies an error raised while computing.
    pub fn from_compute(e: diwt::Error) -> Self {
        match e {
            diwt::Error::PrecisionBudgetExceeded { .. } => Failure::PrecisionCap(e.to_string()),
            diwt::Error::InvalidInput(_) | diwt::Error::UnknownCheckId(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}
