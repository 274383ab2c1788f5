//! Tabular datasets: synthetic generators, CSV ingestion, scaling, splitting,
//! resampling, group holdouts and feature corruption.

mod csv_io;
mod ops;
mod scaler;
mod synthetic;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::numeric::{Matrix, NumericError};

pub use csv_io::{load_csv, read_csv};
pub use ops::{
    bootstrap_sample, corrupt_feature, exclude_group, grid_2d, split, split_stratified,
    CorruptionSpec, SplitFractions,
};
pub use scaler::StandardScaler;
pub use synthetic::{
    generate_synthetic, generate_toy, GroupSpec, SyntheticConfig, ToyConfig, ToyMode,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("i/o error reading {path}: {message}")]
    Io { path: String, message: String },
    #[error("file is empty or has no data rows")]
    EmptyFile,
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}: label must be 0 or 1, found `{value}`")]
    InvalidLabel { row: u64, value: String },
    #[error("row {row}, column `{column}`: group flag must be 0 or 1, found `{value}`")]
    InvalidGroupFlag {
        row: u64,
        column: String,
        value: String,
    },
    #[error("malformed csv at row {row}: {message}")]
    Malformed { row: u64, message: String },
    #[error("duplicate feature name `{0}`")]
    DuplicateFeatureName(String),
    #[error("{what}: expected {expected} entries, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("label at index {index} is {value}, expected 0 or 1")]
    LabelValue { index: usize, value: u8 },
    #[error("need at least {needed} rows, found {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("split produced an empty {0} part")]
    EmptyPart(&'static str),
    #[error("no row carries group tag `{0}`")]
    UnknownTag(String),
    #[error("feature index {index} out of range for {n_features} features")]
    FeatureIndex { index: usize, n_features: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Feature matrix with binary labels, feature names and per-row group tags.
///
/// Group tags are row metadata only; they never appear among the features.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    group_tags: Vec<BTreeSet<String>>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<u8>,
        feature_names: Vec<String>,
        group_tags: Vec<BTreeSet<String>>,
    ) -> Result<Self, DataError> {
        let n = features.rows();
        if labels.len() != n {
            return Err(DataError::LengthMismatch {
                what: "labels",
                expected: n,
                found: labels.len(),
            });
        }
        if group_tags.len() != n {
            return Err(DataError::LengthMismatch {
                what: "group tags",
                expected: n,
                found: group_tags.len(),
            });
        }
        if feature_names.len() != features.cols() {
            return Err(DataError::LengthMismatch {
                what: "feature names",
                expected: features.cols(),
                found: feature_names.len(),
            });
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &y)| y > 1) {
            return Err(DataError::LabelValue { index, value });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateFeatureName(name.clone()));
            }
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            group_tags,
        })
    }

    /// Dataset without group tags and with names `x1, x2, …`.
    pub fn from_parts(features: Matrix, labels: Vec<u8>) -> Result<Self, DataError> {
        let names = default_feature_names(features.cols());
        let tags = vec![BTreeSet::new(); features.rows()];
        Self::new(features, labels, names, tags)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn group_tags(&self) -> &[BTreeSet<String>] {
        &self.group_tags
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.positive_count();
        pos > 0 && pos < self.len()
    }

    /// Number of rows carrying each tag.
    pub fn tag_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for tags in &self.group_tags {
            for t in tags {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Rows at `indices`, in that order. Indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            group_tags: indices.iter().map(|&i| self.group_tags[i].clone()).collect(),
        }
    }

    /// Same rows with a replaced feature matrix of identical shape.
    pub fn with_features(&self, features: Matrix) -> Result<Dataset, DataError> {
        if features.shape() != self.features.shape() {
            return Err(NumericError::ShapeMismatch {
                op: "with_features",
                left: self.features.shape(),
                right: features.shape(),
            }
            .into());
        }
        Ok(Dataset {
            features,
            ..self.clone()
        })
    }

    /// Appends the rows of `other`, which must have the same feature names.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset, DataError> {
        if self.feature_names != other.feature_names {
            return Err(DataError::InvalidParameter(
                "cannot concatenate datasets with different features".into(),
            ));
        }
        let mut data = self.features.as_slice().to_vec();
        data.extend_from_slice(other.features.as_slice());
        let features = Matrix::from_vec(self.len() + other.len(), self.n_features(), data)?;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let mut tags = self.group_tags.clone();
        tags.extend(other.group_tags.iter().cloned());
        Dataset::new(features, labels, self.feature_names.clone(), tags)
    }
}

pub(crate) fn default_feature_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_binary_labels() {
        let err = Dataset::from_parts(Matrix::zeros(2, 1), vec![0, 2]).unwrap_err();
        assert!(matches!(err, DataError::LabelValue { index: 1, value: 2 }));
    }

    #[test]
    fn rejects_duplicate_names() {
        let err = Dataset::new(
            Matrix::zeros(1, 2),
            vec![0],
            vec!["a".into(), "a".into()],
            vec![BTreeSet::new()],
        )
        .unwrap_err();
        assert_eq!(err, DataError::DuplicateFeatureName("a".into()));
    }

    #[test]
    fn concat_appends_rows() {
        let a = Dataset::from_parts(Matrix::filled(2, 2, 1.0), vec![0, 1]).unwrap();
        let b = Dataset::from_parts(Matrix::filled(1, 2, 2.0), vec![1]).unwrap();
        let c = a.concat(&b).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.labels(), &[0, 1, 1]);
        assert_eq!(c.features().row(2), &[2.0, 2.0]);
    }
}
