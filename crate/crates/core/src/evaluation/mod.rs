//! Experimental protocols: confidence-performance curves, out-of-domain
//! detection by group holdout, feature corruption, seed sweeps and 2-D
//! surface exports.

mod curve;
mod methods;
mod shift;
mod surfaces;
mod sweep;

pub use curve::{confidence_performance, curve_experiment, default_fractions, CurvePoint, MethodCurve};
pub use methods::{train_methods, MethodConfig, MethodModel, Scores, Splits, TrainedMethod};
pub use shift::{
    corruption_experiment, detection_auc, ood_experiment, ood_experiment_methods, CorruptionResult,
    DetectionResult,
};
pub use surfaces::{toy_surfaces, SurfacePoint, TOY_BOUNDS};
pub use sweep::{mean_std, seed_sweep, Aggregate, MetricKey, Observation, SeedRun, SeedSweep};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datasets::DataError;
use crate::metrics::MetricError;
use crate::models::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no predictions to evaluate")]
    Empty,
    #[error("length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("both classes must be present in the evaluated set")]
    SingleClass,
    #[error("invalid fraction {0}; fractions must lie in (0, 1]")]
    InvalidFraction(f64),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("invalid setting: {0}")]
    InvalidConfig(String),
    #[error("seed {seed}: {source}")]
    Seed {
        seed: u64,
        #[source]
        source: Box<EvalError>,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Uncertainty method under evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SingleNn,
    NnEnsemble,
    McDropout,
    BootstrapLr,
    Vae,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SingleNn,
        Method::NnEnsemble,
        Method::McDropout,
        Method::BootstrapLr,
        Method::Vae,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::SingleNn => "single-nn",
            Method::NnEnsemble => "nn-ensemble",
            Method::McDropout => "mc-dropout",
            Method::BootstrapLr => "bootstrap-lr",
            Method::Vae => "vae",
        }
    }

    /// Whether the method's uncertainty comes from its own classifier.
    pub fn has_classifier(self) -> bool {
        self != Method::Vae
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| EvalError::UnknownMethod(s.to_string()))
    }
}

/// Which population a scored row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Test,
    Ood,
    Perturbed,
}

/// Per-row probability, uncertainty and label for one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredPredictions {
    pub method: Method,
    pub origin: Origin,
    probabilities: Vec<f64>,
    uncertainty: Vec<f64>,
    labels: Vec<u8>,
}

impl ScoredPredictions {
    pub fn new(
        method: Method,
        origin: Origin,
        probabilities: Vec<f64>,
        uncertainty: Vec<f64>,
        labels: Vec<u8>,
    ) -> Result<Self, EvalError> {
        let n = probabilities.len();
        for (what, found) in [("uncertainty", uncertainty.len()), ("labels", labels.len())] {
            if found != n {
                return Err(EvalError::LengthMismatch {
                    what,
                    expected: n,
                    found,
                });
            }
        }
        crate::metrics::check_probs(&probabilities)?;
        if let Some(index) = uncertainty.iter().position(|u| !u.is_finite()) {
            return Err(MetricError::NonFinite { index }.into());
        }
        crate::metrics::check_labels(n, &labels)?;
        Ok(Self {
            method,
            origin,
            probabilities,
            uncertainty,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn uncertainty(&self) -> &[f64] {
        &self.uncertainty
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Same rows and uncertainty with replaced probabilities.
    pub fn with_probabilities(&self, probabilities: Vec<f64>) -> Result<Self, EvalError> {
        Self::new(
            self.method,
            self.origin,
            probabilities,
            self.uncertainty.clone(),
            self.labels.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
        assert_eq!(
            "forest".parse::<Method>().unwrap_err(),
            EvalError::UnknownMethod("forest".into())
        );
    }

    #[test]
    fn scored_predictions_validate() {
        assert!(ScoredPredictions::new(Method::SingleNn, Origin::Test, vec![0.5], vec![0.1], vec![1]).is_ok());
        assert!(matches!(
            ScoredPredictions::new(Method::SingleNn, Origin::Test, vec![0.5], vec![], vec![1]),
            Err(EvalError::LengthMismatch { .. })
        ));
        assert!(ScoredPredictions::new(Method::SingleNn, Origin::Test, vec![1.5], vec![0.1], vec![1]).is_err());
        assert!(ScoredPredictions::new(Method::SingleNn, Origin::Test, vec![0.5], vec![f64::NAN], vec![1]).is_err());
    }
}
