use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid logic order {0}: must be at least 2")]
    InvalidOrder(i64),
    #[error("sector orders differ: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("argument of zero is undefined")]
    ZeroArgument,
    #[error("activation input is zero")]
    DegenerateActivation,
    #[error("invalid radix query: {0}")]
    InvalidRadix(String),
    #[error("occupation numbers must be non-negative, got ({0}, {1})")]
    InvalidOccupation(i64, i64),
    #[error("invalid spin label 2j={two_j}, 2m={two_m}")]
    InvalidSpin { two_j: i64, two_m: i64 },
    #[error("operator needs a one-mode state but found w-occupation {0}")]
    ModeMismatch(u32),
    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(String),
    #[error("arity mismatch: expected {expected}, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("input {index} of sample {sample} has modulus {modulus}, expected 1")]
    NotUnitModulus {
        sample: usize,
        index: usize,
        modulus: f64,
    },
    #[error("qubit input {0} is not normalized (norm² = {1})")]
    NotNormalized(usize, f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("network structure mismatch: {0}")]
    Structure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
