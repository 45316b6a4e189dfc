use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Schatten exponent must satisfy {expected}, got {got}")]
    InvalidExponent { got: f64, expected: &'static str },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("operation undefined for the zero matrix")]
    ZeroMatrix,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} relative to scale {scale:e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("negative power {power} of a singular matrix (eigenvalue ratio {ratio:e})")]
    Singular { power: f64, ratio: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not faithful: {0}")]
    NotFaithful(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
