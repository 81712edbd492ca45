use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum QcorrError {
    /// A caller-supplied argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A matrix that must be positive semidefinite has an eigenvalue below
    /// the accepted floor.
    #[error("matrix is not positive semidefinite: {0}")]
    NotPsd(String),

    /// A matrix does not satisfy the density-matrix invariants.
    #[error("not a valid density matrix: {0}")]
    NotAState(String),

    /// A Kraus set failed the completeness check, so the map is not a
    /// trace-preserving quantum channel.
    #[error("complete-positivity violation: {0}")]
    CompletePositivityViolation(String),

    /// An analytic Kraus derivative was requested exactly at a square-root
    /// branch point, where the chain rule divides by zero.
    #[error("derivative singularity at t = {time}: {what}")]
    DerivativeSingularity { time: f64, what: String },

    /// A run configuration could not be parsed or failed validation.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QcorrError>;
