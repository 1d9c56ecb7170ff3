use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds a desk-scale resource cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    /// A qubit index is not smaller than the circuit width.
    #[error("qubit index {index} out of range for {width} qubits")]
    QubitOutOfRange { index: usize, width: usize },

    /// The same qubit was used twice where distinct qubits are required.
    #[error("qubit {0} used more than once")]
    QubitCollision(usize),

    /// Two independently computed quantities disagree beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
