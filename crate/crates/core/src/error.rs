use thiserror::Error;

/// Errors raised while planning or executing a transform.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NfftError {
    #[error("node {index} has a non-finite coordinate")]
    NonFiniteNode { index: usize },

    #[error("invalid geometry: {0}")]
    BadGeometry(String),

    #[error("invalid block size: {0}")]
    BadBlockSize(String),

    #[error("shape mismatch: expected {expected} values, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("window argument {argument} lies outside the valid range |2πv| <= {limit}")]
    DomainError { argument: f64, limit: f64 },

    #[error("reference vector is identically zero")]
    ZeroReference,

    #[error("direct summation of {terms} terms exceeds the limit of {limit}")]
    TooLarge { terms: usize, limit: usize },

    #[error("least-squares fit for window interval {interval} degenerated")]
    SolveFailure { interval: usize },

    #[error("could not allocate {entries} table entries")]
    AllocationFailure { entries: usize },

    #[error("fft planning failed: {0}")]
    PlanFailure(String),
}

pub type Result<T> = std::result::Result<T, NfftError>;
