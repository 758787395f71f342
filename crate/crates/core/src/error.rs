use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("gamma pole at non-positive integer x = {0}")]
    GammaPole(f64),
    #[error("series failed to converge after {terms} terms (last |term| = {last_term:e})")]
    NonConvergence { terms: usize, last_term: f64 },
    #[error("invalid process parameters: {0}")]
    InvalidSpec(String),
    #[error("covariance matrix numerically degenerate: {0}")]
    Degenerate(String),
    #[error("Cholesky factorization failed even with diagonal jitter {jitter:e}")]
    Factorization { jitter: f64 },
    #[error("circulant embedding not nonnegative definite: min eigenvalue {min_eig:e} (max {max_eig:e})")]
    Embedding { min_eig: f64, max_eig: f64 },
    #[error("lag {tau} out of range for sample length {n}")]
    LagOutOfRange { tau: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
