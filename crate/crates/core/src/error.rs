use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quaternionic dimension must be at least 1")]
    ZeroDimension,

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("matrix is not quaternion-hermitian: entry ({row}, {col}) differs from the conjugate of ({col}, {row})")]
    NotQuaternionHermitian { row: usize, col: usize },

    #[error("matrix is not hermitian: entry ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("form is not J-real (deviation {deviation:.3e})")]
    NotJReal { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("eigenvalues do not pair up: gap {gap:.3e} exceeds {tolerance:.3e}")]
    PairingFailure { gap: f64, tolerance: f64 },

    #[error("eigenvalue tuple {lambda:?} lies outside the admissible cone of {operator}")]
    OutsideCone { operator: String, lambda: Vec<f64> },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("right-hand side dynamic range {range:.3e} exceeds the aliasing guard {limit:.1e}")]
    DynamicRange { range: f64, limit: f64 },

    #[error("Newton iteration failed after {iterations} iterations (residual {residual:.3e}): {reason}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("u_s is not positive on the boundary of the ball (min {min_boundary:.3e})")]
    BoundaryNotPositive { min_boundary: f64 },

    #[error("auxiliary solution is non-negative at a point of the sublevel set (value {value:.3e})")]
    AuxiliaryNonNegative { value: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed grid file: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
