use thiserror::Error;

/// Errors raised by the dressed-state computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unstable system: {0}")]
    Stability(String),

    #[error("singular configuration: {0}")]
    Singularity(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("overflow guard: {0}")]
    OverflowGuard(String),
}

impl Error {
    pub(crate) fn parameter(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter { field, reason: reason.into() }
    }

    /// True for failures of an iterative numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure(_) | Error::Stability(_) | Error::Singularity(_) | Error::OverflowGuard(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
