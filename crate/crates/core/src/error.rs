//! Error type shared by all modules.

use thiserror::Error;

/// Errors reported by matrix operations, factorizations and generators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimension {dim} is odd, expected an even 2n dimension")]
    OddDimension { dim: usize },

    #[error("matrix is not symmetric within relative tolerance {tol:e}")]
    NotSymmetric { tol: f64 },

    #[error("matrix is not positive definite: pivot {pivot:e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("singular triangular system: zero or non-finite diagonal entry at index {index}")]
    SingularTriangular { index: usize },

    #[error("matrix is singular: exact zero pivot in column {column}")]
    Singular { column: usize },

    #[error("degenerate input: relative symplecticity defect of the zero matrix is undefined")]
    DegenerateInput,

    #[error("condition bound inapplicable: defect {delta:e} is not below 1")]
    BoundInapplicable { delta: f64 },

    #[error("block structure violated: {0}")]
    Structure(String),

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
