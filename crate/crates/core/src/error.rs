use thiserror::Error;

/// Errors raised by the numerical kernels and the solvers built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("singular matrix: pivot {pivot} has magnitude {magnitude:e}")]
    Singular { pivot: usize, magnitude: f64 },

    #[error("eigenvector matrix is too ill-conditioned (cond ~ {cond:e}); use the quadrature method")]
    Defective { cond: f64 },

    #[error("not a projection (residual {residual:e})")]
    NotProjection { residual: f64 },

    #[error("size cap exceeded: {size} > {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
