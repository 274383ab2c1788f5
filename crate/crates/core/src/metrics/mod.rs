//! Scoring primitives: entropy, ranking AUC, binned calibration error and
//! Platt recalibration.

mod auc;
mod calibration;
mod platt;

pub use auc::{auc_roc, auc_roc_pairwise};
pub use calibration::{calibration_bins, ece, CalibrationBin, CalibrationBins, DEFAULT_BINS};
pub use platt::{platt_apply, platt_fit, PlattParams, PLATT_CLAMP};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("probability {value} at index {index} is outside [0, 1]")]
    ProbabilityRange { index: usize, value: f64 },
    #[error("score at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("label {value} at index {index} is not 0 or 1")]
    InvalidLabel { index: usize, value: u8 },
    #[error("length mismatch: {left} values but {right} labels")]
    LengthMismatch { left: usize, right: usize },
    #[error("metric is undefined when only one class is present")]
    SingleClass,
    #[error("metric is undefined on an empty set")]
    Empty,
    #[error("number of bins must be positive")]
    NoBins,
}

/// Binary entropy in nats, with `0·ln 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64, MetricError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MetricError::ProbabilityRange { index: 0, value: p });
    }
    Ok(xlnx(p) + xlnx(1.0 - p))
}

fn xlnx(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        -p * p.ln()
    }
}

/// Pointwise entropy of a probability vector.
pub fn entropies(probs: &[f64]) -> Result<Vec<f64>, MetricError> {
    check_probs(probs)?;
    Ok(probs.iter().map(|&p| xlnx(p) + xlnx(1.0 - p)).collect())
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<(), MetricError> {
    match probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(index) => Err(MetricError::ProbabilityRange {
            index,
            value: probs[index],
        }),
        None => Ok(()),
    }
}

/// Validates lengths and label values; returns the positive count.
pub(crate) fn check_labels(n: usize, labels: &[u8]) -> Result<usize, MetricError> {
    if n != labels.len() {
        return Err(MetricError::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    let mut pos = 0;
    for (index, &value) in labels.iter().enumerate() {
        match value {
            0 => {}
            1 => pos += 1,
            _ => return Err(MetricError::InvalidLabel { index, value }),
        }
    }
    Ok(pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.9).unwrap() - 0.325083).abs() < 5e-7);
    }

    #[test]
    fn entropy_symmetric_and_bounded() {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let h = binary_entropy(p).unwrap();
            assert!((h - binary_entropy(1.0 - p).unwrap()).abs() < 1e-12);
            assert!(h <= std::f64::consts::LN_2 + 1e-15);
        }
    }

    #[test]
    fn entropy_rejects_out_of_range() {
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
        assert!(entropies(&[0.2, 2.0]).is_err());
    }
}
