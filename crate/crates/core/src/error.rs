use thiserror::Error;

/// Errors raised when a caller breaks an operation's contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("vector is not in the kernel of the matrix")]
    NotInKernel,

    #[error("vector has a negative entry at index {0}")]
    Negative(usize),

    #[error("invalid block indices: {0}")]
    BadIndices(String),

    #[error("step precondition violated: x - g has a negative entry at index {0}")]
    StepPrecondition(usize),

    #[error("graver complexity mismatch: formula gives {formula}, direct computation gives {direct}")]
    ComplexityMismatch { formula: usize, direct: usize },

    #[error("computation exceeded its budget: {0}")]
    Budget(String),

    #[error("invalid instance: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
