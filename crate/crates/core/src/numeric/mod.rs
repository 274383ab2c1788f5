//! Dense linear algebra, activations, seeded randomness, the Adam optimizer
//! and a central-difference gradient oracle.
//!
//! Everything here is `f64` and deterministic: given the same seed, every
//! routine produces bit-identical output.

mod activation;
mod adam;
mod gradcheck;
mod matrix;
mod rng;

pub use activation::{activation, dropout_mask, sigmoid, Activation};
pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{finite_difference_gradient, max_relative_error, relative_error};
pub use matrix::{matmul, Matrix};
pub use rng::SeededRng;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("{op}: shape mismatch between {}×{} and {}×{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("data of length {len} cannot fill a {rows}×{cols} matrix")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl NumericError {
    pub(crate) fn shape(op: &'static str, a: &Matrix, b: &Matrix) -> Self {
        NumericError::ShapeMismatch {
            op,
            left: a.shape(),
            right: b.shape(),
        }
    }
}
