//! Trainable predictors and uncertainty sources.
//!
//! Every model here is a plain parameter container; training functions take
//! a [`SeededRng`](crate::numeric::SeededRng) and are bitwise reproducible.

mod ensemble;
mod logistic;
mod loss;
mod mlp;
mod persist;
mod vae;

use thiserror::Error;

use crate::datasets::DataError;
use crate::numeric::{Matrix, NumericError};

pub use ensemble::{mc_dropout_predict, train_bootstrapped_lr, train_deep_ensemble, Ensemble};
pub use logistic::{train_logistic, train_logistic_report, LogisticConfig, LogisticFit, LogisticModel};
pub use loss::{batch_positive_weight, weighted_bce, weighted_bce_logit_grad, weighted_bce_loss};
pub use mlp::{
    train_mlp, train_mlp_report, DenseLayer, MlpModel, TrainConfig, TrainingReport,
};
pub use persist::{ModelFile, SavedModel, MODEL_FORMAT, MODEL_FORMAT_VERSION};
pub use vae::{train_vae, train_vae_report, vae_novelty_score, VaeConfig, VaeGradients, VaeModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("validation set is empty")]
    EmptyValidationSet,
    #[error("expected {expected} input features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training diverged to a non-finite loss in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("class weighting needs both classes in the training data")]
    SingleClass,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("an ensemble needs at least one member")]
    EmptyEnsemble,
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Anything that maps a feature matrix to positive-class probabilities.
pub trait Classifier {
    fn input_dim(&self) -> usize;

    fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>, ModelError>;
}

pub(crate) fn check_dim(expected: usize, x: &Matrix) -> Result<(), ModelError> {
    if x.cols() != expected {
        return Err(ModelError::DimensionMismatch {
            expected,
            found: x.cols(),
        });
    }
    Ok(())
}
