use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};
use crate::numeric::{Matrix, NumericError};

/// Smallest standard deviation a fitted scaler will divide by.
pub const STD_FLOOR: f64 = 1e-12;

/// Per-feature standardisation `z = (x - mean) / std` with population std.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardScaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(data: &Dataset) -> Result<Self, DataError> {
        Self::fit_matrix(data.features())
    }

    pub fn fit_matrix(x: &Matrix) -> Result<Self, DataError> {
        let n = x.rows();
        if n < 2 {
            return Err(DataError::TooFewRows { needed: 2, found: n });
        }
        let nf = n as f64;
        let mut means = Vec::with_capacity(x.cols());
        let mut stds = Vec::with_capacity(x.cols());
        for c in 0..x.cols() {
            let col = x.column(c);
            let rough = col.iter().sum::<f64>() / nf;
            // second pass removes the rounding of the first, so a constant
            // column recovers its value exactly
            let mean = rough + col.iter().map(|v| v - rough).sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            means.push(mean);
            stds.push(var.sqrt().max(STD_FLOOR));
        }
        Ok(Self { means, stds })
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix, NumericError> {
        if x.cols() != self.means.len() {
            return Err(NumericError::ShapeMismatch {
                op: "scale",
                left: x.shape(),
                right: (1, self.means.len()),
            });
        }
        let mut out = x.clone();
        for r in 0..out.rows() {
            for ((v, m), s) in out.row_mut(r).iter_mut().zip(&self.means).zip(&self.stds) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset, DataError> {
        data.with_features(self.transform(data.features())?)
    }
}
