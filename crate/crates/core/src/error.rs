use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("local factor {party} is not invertible (|det| = {det:e})")]
    Singular { party: usize, det: f64 },
    #[error("matrix is not hermitian positive-definite (min eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },
    #[error("coordinates outside span{{I, S_w, S_-w}} for w = {w} (max off-span magnitude {residual:e})")]
    SpanViolation { w: String, residual: f64 },
    #[error("seed parameters differ: {0}")]
    SeedMismatch(String),
    #[error("seed is not generic: {0}")]
    NotGeneric(String),
    #[error("seed parameters vanish")]
    ZeroSeed,
    #[error("symmetry residual {0:e} exceeds 1e-8")]
    SymmetryResidual(f64),
    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),
    #[error("state does not have the required structure: {0}")]
    Structure(String),
    #[error("no admissible epsilon above {eps_min:e}")]
    NoEpsilon { eps_min: f64 },
    #[error("generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
