//! Exact linear algebra over a [`Field`](crate::scalar::Field): dense matrices,
//! ranks, canonical kernels, and normalized projective points.

mod matrix;
mod projective;

pub use matrix::Matrix;
pub use projective::{columns_proportional, normalize_homogeneous, ProjectiveLinePoint};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("matrix of shape {rows}x{cols} cannot hold {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("row {row} has a different length from the first row")]
    RaggedRow { row: usize },
    #[error("the zero vector does not define a projective point")]
    ZeroPoint,
    #[error("expected a vector of length {expected}, got {got}")]
    Length { expected: usize, got: usize },
}
