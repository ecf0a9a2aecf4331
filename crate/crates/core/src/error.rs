use thiserror::Error;

/// Errors raised by the zero-sum toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group parameters: {0}")]
    InvalidGroup(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateOutOfRange { value: u64, modulus: u64 },

    #[error("index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: u64, order: u64 },

    #[error("operation requires an odd modulus, got n = {0}")]
    EvenModulus(u64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid weight set: {0}")]
    InvalidWeights(String),

    #[error("invalid length {length}: sequence has length {available}")]
    InvalidLength { length: u64, available: u64 },

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("brute-force guard exceeded: {0} candidate evaluations")]
    GuardExceeded(u128),

    #[error("search table too large: {0} bits")]
    TooLarge(u128),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("contradictory bounds: {0}")]
    Contradiction(String),

    #[error("malformed certificate: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
