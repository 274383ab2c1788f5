use serde::{Deserialize, Serialize};

use super::{check_labels, check_probs, MetricError};

pub const DEFAULT_BINS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Mean predicted probability; 0 for an empty bin.
    pub mean_probability: f64,
    /// Observed positive fraction; 0 for an empty bin.
    pub positive_fraction: f64,
}

/// Equal-width bins on [0, 1]. Bin `k` covers `[k/K, (k+1)/K)`; the last bin
/// also holds 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBins {
    pub bins: Vec<CalibrationBin>,
    pub total: usize,
}

impl CalibrationBins {
    /// `(1/N) Σ N_k |ȳ_k − ō_k|`.
    pub fn ece(&self) -> f64 {
        let weighted: f64 = self
            .bins
            .iter()
            .map(|b| b.count as f64 * (b.mean_probability - b.positive_fraction).abs())
            .sum();
        weighted / self.total as f64
    }
}

fn bin_index(p: f64, k: usize) -> usize {
    ((p * k as f64).floor() as usize).min(k - 1)
}

pub fn calibration_bins(
    probs: &[f64],
    outcomes: &[u8],
    k: usize,
) -> Result<CalibrationBins, MetricError> {
    if k == 0 {
        return Err(MetricError::NoBins);
    }
    check_probs(probs)?;
    check_labels(probs.len(), outcomes)?;
    if probs.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut counts = vec![0usize; k];
    let mut prob_sums = vec![0.0; k];
    let mut positives = vec![0usize; k];
    for (&p, &y) in probs.iter().zip(outcomes) {
        let b = bin_index(p, k);
        counts[b] += 1;
        prob_sums[b] += p;
        positives[b] += y as usize;
    }
    let bins = (0..k)
        .map(|b| {
            let n = counts[b];
            let (mean_probability, positive_fraction) = if n == 0 {
                (0.0, 0.0)
            } else {
                (prob_sums[b] / n as f64, positives[b] as f64 / n as f64)
            };
            CalibrationBin {
                lower: b as f64 / k as f64,
                upper: (b + 1) as f64 / k as f64,
                count: n,
                mean_probability,
                positive_fraction,
            }
        })
        .collect();
    Ok(CalibrationBins {
        bins,
        total: probs.len(),
    })
}

/// Expected calibration error over `k` equal-width bins.
pub fn ece(probs: &[f64], outcomes: &[u8], k: usize) -> Result<f64, MetricError> {
    calibration_bins(probs, outcomes, k).map(|b| b.ece())
}
