use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{default_feature_names, DataError, Dataset};
use crate::numeric::{Matrix, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToyMode {
    Balanced,
    Unbalanced,
}

/// Two 2-D Gaussian clusters: positives around (2, 2), negatives around (−1, −1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub mode: ToyMode,
    pub n_train: usize,
}

impl ToyConfig {
    pub const POSITIVE_MEAN: [f64; 2] = [2.0, 2.0];
    pub const NEGATIVE_MEAN: [f64; 2] = [-1.0, -1.0];
    pub const NEGATIVE_VARIANCE: f64 = 4.0;
    /// Negatives per positive in unbalanced mode.
    pub const IMBALANCE_RATIO: usize = 6;

    pub fn new(mode: ToyMode) -> Self {
        Self { mode, n_train: 200 }
    }

    pub fn positive_variance(&self) -> f64 {
        match self.mode {
            ToyMode::Balanced => 4.0,
            ToyMode::Unbalanced => 2.0,
        }
    }

    /// `(negatives, positives)` for `n_train` points.
    pub fn class_counts(&self) -> (usize, usize) {
        let positives = match self.mode {
            ToyMode::Balanced => self.n_train / 2,
            ToyMode::Unbalanced => {
                let parts = (Self::IMBALANCE_RATIO + 1) as f64;
                (self.n_train as f64 / parts).round() as usize
            }
        };
        (self.n_train - positives, positives)
    }
}

/// Samples the two toy clusters. Rows come out shuffled.
pub fn generate_toy(config: &ToyConfig, rng: &mut SeededRng) -> Dataset {
    let (n_neg, n_pos) = config.class_counts();
    let pos_sd = config.positive_variance().sqrt();
    let neg_sd = ToyConfig::NEGATIVE_VARIANCE.sqrt();
    let mut rows: Vec<([f64; 2], u8)> = Vec::with_capacity(n_neg + n_pos);
    for _ in 0..n_neg {
        let p = [
            ToyConfig::NEGATIVE_MEAN[0] + neg_sd * rng.normal(),
            ToyConfig::NEGATIVE_MEAN[1] + neg_sd * rng.normal(),
        ];
        rows.push((p, 0));
    }
    for _ in 0..n_pos {
        let p = [
            ToyConfig::POSITIVE_MEAN[0] + pos_sd * rng.normal(),
            ToyConfig::POSITIVE_MEAN[1] + pos_sd * rng.normal(),
        ];
        rows.push((p, 1));
    }
    rng.shuffle(&mut rows);
    let data = rows.iter().flat_map(|(p, _)| p.iter().copied()).collect();
    let labels = rows.iter().map(|&(_, y)| y).collect();
    let features = Matrix::from_vec(rows.len(), 2, data).expect("two columns per row");
    Dataset::from_parts(features, labels).expect("toy data is well formed")
}

/// A tagged subpopulation of a synthetic dataset, optionally shifted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub tag: String,
    /// Share of all rows carrying the tag.
    pub fraction: f64,
    /// `(feature index, additive shift)` applied to tagged rows.
    #[serde(default)]
    pub shift: Vec<(usize, f64)>,
}

/// Churn-like tabular data: unit-variance Gaussian features, a fixed share of
/// positives whose first `informative` features are shifted by `separation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticConfig {
    pub n_rows: usize,
    pub n_features: usize,
    pub positive_fraction: f64,
    pub informative: usize,
    pub separation: f64,
    pub groups: Vec<GroupSpec>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n_rows: 10_000,
            n_features: 10,
            positive_fraction: 0.15,
            informative: 5,
            separation: 0.6,
            groups: Vec::new(),
        }
    }
}

pub fn generate_synthetic(
    config: &SyntheticConfig,
    rng: &mut SeededRng,
) -> Result<Dataset, DataError> {
    let n = config.n_rows;
    let d = config.n_features;
    if n == 0 || d == 0 {
        return Err(DataError::InvalidParameter(
            "synthetic data needs at least one row and one feature".into(),
        ));
    }
    if !(0.0..=1.0).contains(&config.positive_fraction) || config.informative > d {
        return Err(DataError::InvalidParameter(
            "positive_fraction must lie in [0, 1] and informative ≤ n_features".into(),
        ));
    }
    let n_pos = (config.positive_fraction * n as f64).round() as usize;
    let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i < n_pos)).collect();
    rng.split("labels").shuffle(&mut labels);

    let mut noise = rng.split("features");
    let mut features = Matrix::zeros(n, d);
    for (r, &y) in labels.iter().enumerate() {
        for (c, v) in features.row_mut(r).iter_mut().enumerate() {
            *v = noise.normal();
            if y == 1 && c < config.informative {
                *v += config.separation;
            }
        }
    }

    let mut tags = vec![BTreeSet::new(); n];
    for group in &config.groups {
        if !(0.0..=1.0).contains(&group.fraction) {
            return Err(DataError::InvalidParameter(format!(
                "group `{}` fraction must lie in [0, 1]",
                group.tag
            )));
        }
        if let Some(&(index, _)) = group.shift.iter().find(|(i, _)| *i >= d) {
            return Err(DataError::FeatureIndex {
                index,
                n_features: d,
            });
        }
        let count = (group.fraction * n as f64).round() as usize;
        let members = rng.split(&format!("group:{}", group.tag)).sample_indices(n, count);
        for r in members {
            tags[r].insert(group.tag.clone());
            for &(c, delta) in &group.shift {
                let v = features.get(r, c);
                features.set(r, c, v + delta);
            }
        }
    }
    Dataset::new(features, labels, default_feature_names(d), tags)
}
