use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("interval endpoints must satisfy {lo} < {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("endpoint {value} outside [0, {limit}]")]
    EndpointOutOfRange { value: f64, limit: f64 },

    #[error("angle jump at interval {index} is degenerate (|sin| = {sin_abs:e})")]
    DegenerateJump { index: usize, sin_abs: f64 },

    #[error("Hamiltonian is not bridge-normalized: {0}")]
    NotBridgeNormalized(String),

    #[error("sequence too short: need at least {needed}, got {got}")]
    SequenceTooShort { needed: usize, got: usize },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("truncation rule unsatisfiable: {0}")]
    TruncationUnsatisfiable(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
