use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("matrix is not square: {rows} rows, {len} entries")]
    NotSquare { rows: usize, len: usize },

    #[error("vector {index} is linearly dependent on its predecessors (residual norm {residual:e})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("coefficients are not normalized (sum of squared moduli {0})")]
    CoefficientsNotNormalized(f64),

    #[error("basis is not orthonormal (worst deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("new Alice basis does not span the same subspace (deviation {0:e})")]
    SpanMismatch(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("Bloch point lies outside the unit ball (norm {0})")]
    OutsideBall(f64),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("observable is not ray invariant (deviation {0:e})")]
    NotRayInvariant(f64),

    #[error("observable is not a counting observable: value {0} outside [0, 1]")]
    NotCounting(f64),

    #[error("subspaces are not orthogonal (overlap {0:e})")]
    NotOrthogonal(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
