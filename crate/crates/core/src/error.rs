use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric routine received a non-finite input value.
    #[error("non-finite value in numeric input")]
    NumericInput,

    /// A numeric decomposition failed to converge.
    #[error("numeric decomposition failed to converge")]
    NumericFailure,

    /// A caller violated a documented precondition.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Operands have incompatible or unexpected shapes.
    #[error("shape error: {0}")]
    Shape(String),

    /// A value is outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A site, bond, or qubit index is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// A configured resource limit was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A state vector is not normalized.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// A gate matrix is invalid (wrong size, not unitary, bad targets).
    #[error("gate error: {0}")]
    Gate(String),

    /// An observable factor is not Hermitian or otherwise invalid.
    #[error("observable error: {0}")]
    Observable(String),

    /// Circuit text failed to parse; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
