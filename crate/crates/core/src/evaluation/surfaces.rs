use serde::{Deserialize, Serialize};

use super::methods::TrainedMethod;
use super::EvalError;
use crate::metrics::binary_entropy;
use crate::models::ModelError;
use crate::numeric::{Matrix, SeededRng};

/// Plot window used for the 2-D toy data.
pub const TOY_BOUNDS: [(f64, f64); 2] = [(-8.0, 8.0), (-8.0, 8.0)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub x1: f64,
    pub x2: f64,
    pub probability: f64,
    pub entropy: f64,
    /// VAE novelty score; absent for the other methods.
    pub novelty: Option<f64>,
}

/// Probability, entropy and (for the VAE) novelty at every grid point.
pub fn toy_surfaces(
    method: &TrainedMethod,
    grid: &Matrix,
    rng: &SeededRng,
) -> Result<Vec<SurfacePoint>, EvalError> {
    for found in [grid.cols(), method.input_dim()] {
        if found != 2 {
            return Err(ModelError::DimensionMismatch { expected: 2, found }.into());
        }
    }
    let scores = method.score(grid, rng)?;
    let novelty = !method.method.has_classifier();
    grid.iter_rows()
        .zip(scores.probabilities.iter().zip(&scores.uncertainty))
        .map(|(row, (&p, &u))| {
            Ok(SurfacePoint {
                x1: row[0],
                x2: row[1],
                probability: p,
                entropy: binary_entropy(p)?,
                novelty: novelty.then_some(u),
            })
        })
        .collect()
}
