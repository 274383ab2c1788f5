use serde::{Deserialize, Serialize};

use super::{DataError, Dataset};
use crate::numeric::{Matrix, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Self {
        Self { train, val, test }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|&f| !(f > 0.0) || !f.is_finite()) {
            return Err(DataError::InvalidFractions(format!(
                "fractions must be positive, got {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DataError::InvalidFractions(format!(
                "fractions must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    /// Part sizes for `n` rows: train and val are rounded, test takes the rest.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let n_train = ((self.train * n as f64).round() as usize).min(n);
        let n_val = ((self.val * n as f64).round() as usize).min(n - n_train);
        (n_train, n_val, n - n_train - n_val)
    }
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self::new(0.6, 0.2, 0.2)
    }
}

/// Uniform random partition into train/val/test. Each part keeps the
/// original row order.
pub fn split(
    data: &Dataset,
    fractions: SplitFractions,
    rng: &mut SeededRng,
) -> Result<(Dataset, Dataset, Dataset), DataError> {
    fractions.validate()?;
    let mut order: Vec<usize> = (0..data.len()).collect();
    rng.shuffle(&mut order);
    let (n_train, n_val, _) = fractions.sizes(data.len());
    let (train, rest) = order.split_at(n_train);
    let (val, test) = rest.split_at(n_val);
    finish_split(data, train.to_vec(), val.to_vec(), test.to_vec())
}

/// Like [`split`] but partitions each class separately, so every part keeps
/// the overall positive share up to rounding.
pub fn split_stratified(
    data: &Dataset,
    fractions: SplitFractions,
    rng: &mut SeededRng,
) -> Result<(Dataset, Dataset, Dataset), DataError> {
    fractions.validate()?;
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..data.len())
            .filter(|&i| data.labels()[i] == class)
            .collect();
        rng.shuffle(&mut idx);
        let (n_train, n_val, _) = fractions.sizes(idx.len());
        train.extend_from_slice(&idx[..n_train]);
        val.extend_from_slice(&idx[n_train..n_train + n_val]);
        test.extend_from_slice(&idx[n_train + n_val..]);
    }
    finish_split(data, train, val, test)
}

fn finish_split(
    data: &Dataset,
    mut train: Vec<usize>,
    mut val: Vec<usize>,
    mut test: Vec<usize>,
) -> Result<(Dataset, Dataset, Dataset), DataError> {
    for (name, part) in [("train", &train), ("validation", &val), ("test", &test)] {
        if part.is_empty() {
            return Err(DataError::EmptyPart(name));
        }
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok((
        data.select_rows(&train),
        data.select_rows(&val),
        data.select_rows(&test),
    ))
}

/// `N` rows drawn uniformly with replacement.
pub fn bootstrap_sample(data: &Dataset, rng: &mut SeededRng) -> Result<Dataset, DataError> {
    let n = data.len();
    if n == 0 {
        return Err(DataError::TooFewRows { needed: 1, found: 0 });
    }
    let idx: Vec<usize> = (0..n).map(|_| rng.index(n)).collect();
    Ok(data.select_rows(&idx))
}

/// Splits rows by whether they carry `tag`: `(in_domain, ood)`.
pub fn exclude_group(data: &Dataset, tag: &str) -> Result<(Dataset, Dataset), DataError> {
    let (ood, in_domain): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| data.group_tags()[i].contains(tag));
    if ood.is_empty() {
        return Err(DataError::UnknownTag(tag.to_owned()));
    }
    Ok((data.select_rows(&in_domain), data.select_rows(&ood)))
}

/// Re-scaling of one (already standardised) feature column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub feature: usize,
    pub factor: f64,
}

pub fn corrupt_feature(data: &Dataset, spec: &CorruptionSpec) -> Result<Dataset, DataError> {
    if spec.feature >= data.n_features() {
        return Err(DataError::FeatureIndex {
            index: spec.feature,
            n_features: data.n_features(),
        });
    }
    if !(spec.factor > 0.0) || !spec.factor.is_finite() {
        return Err(DataError::InvalidParameter(format!(
            "corruption factor must be positive, got {}",
            spec.factor
        )));
    }
    let mut x = data.features().clone();
    for r in 0..x.rows() {
        let v = x.get(r, spec.feature);
        x.set(r, spec.feature, v * spec.factor);
    }
    data.with_features(x)
}

/// `resolution²` points spanning the box, first axis outermost: point
/// `i·resolution + j` is `(axis0[i], axis1[j])`.
pub fn grid_2d(bounds: [(f64, f64); 2], resolution: usize) -> Result<Matrix, DataError> {
    if resolution < 2 {
        return Err(DataError::InvalidParameter(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    for (lo, hi) in bounds {
        if !(lo < hi) {
            return Err(DataError::InvalidParameter(format!(
                "grid bounds need min < max, got ({lo}, {hi})"
            )));
        }
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        let step = (hi - lo) / (resolution - 1) as f64;
        (0..resolution)
            .map(|k| if k == resolution - 1 { hi } else { lo + step * k as f64 })
            .collect()
    };
    let a = axis(bounds[0]);
    let b = axis(bounds[1]);
    let mut data = Vec::with_capacity(resolution * resolution * 2);
    for &x in &a {
        for &y in &b {
            data.push(x);
            data.push(y);
        }
    }
    Ok(Matrix::from_vec(resolution * resolution, 2, data)?)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn indexed(n: usize) -> Dataset {
        // feature 0 holds the row id, so partitions can be traced back
        let x = Matrix::from_vec(n, 2, (0..n).flat_map(|i| [i as f64, -(i as f64)]).collect())
            .unwrap();
        Dataset::from_parts(x, (0..n).map(|i| (i % 2) as u8).collect()).unwrap()
    }

    fn ids(d: &Dataset) -> Vec<usize> {
        d.features().column(0).iter().map(|&v| v as usize).collect()
    }

    #[test]
    fn churn_sizes() {
        let d = indexed(10_000);
        let (a, b, c) = split(&d, SplitFractions::default(), &mut SeededRng::new(0)).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (6000, 2000, 2000));
    }

    #[test]
    fn split_partitions_rows() {
        let d = indexed(101);
        let (a, b, c) = split(&d, SplitFractions::new(0.5, 0.3, 0.2), &mut SeededRng::new(4)).unwrap();
        let mut all: Vec<usize> = [ids(&a), ids(&b), ids(&c)].concat();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_reproducible() {
        let d = indexed(50);
        let one = split(&d, SplitFractions::default(), &mut SeededRng::new(8)).unwrap();
        let two = split(&d, SplitFractions::default(), &mut SeededRng::new(8)).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn split_rejects_bad_fractions_and_empty_parts() {
        let d = indexed(10);
        let mut rng = SeededRng::new(0);
        assert!(split(&d, SplitFractions::new(0.5, 0.5, 0.5), &mut rng).is_err());
        assert!(split(&d, SplitFractions::new(1.0, 0.0, 0.0), &mut rng).is_err());
        assert_eq!(
            split(&indexed(2), SplitFractions::default(), &mut rng).unwrap_err(),
            DataError::EmptyPart("validation")
        );
    }

    #[test]
    fn stratified_keeps_class_share() {
        let d = indexed(1000);
        let (a, b, c) =
            split_stratified(&d, SplitFractions::default(), &mut SeededRng::new(2)).unwrap();
        for part in [&a, &b, &c] {
            assert_eq!(part.positive_count() * 2, part.len());
        }
    }

    #[test]
    fn bootstrap_size_and_unique_fraction() {
        let d = indexed(10_000);
        let b = bootstrap_sample(&d, &mut SeededRng::new(3)).unwrap();
        assert_eq!(b.len(), d.len());
        let unique: BTreeSet<usize> = ids(&b).into_iter().collect();
        let frac = unique.len() as f64 / 10_000.0;
        let expected = 1.0 - (-1.0f64).exp();
        assert!((frac - expected).abs() < 0.02, "{frac}");
    }

    #[test]
    fn bootstrap_single_row() {
        let d = indexed(1);
        let b = bootstrap_sample(&d, &mut SeededRng::new(3)).unwrap();
        assert_eq!(b, d);
        assert!(bootstrap_sample(&d.select_rows(&[]), &mut SeededRng::new(0)).is_err());
    }

    fn tagged(n: usize, tagged_rows: &[usize]) -> Dataset {
        let d = indexed(n);
        let tags = (0..n)
            .map(|i| {
                let mut s = BTreeSet::new();
                if tagged_rows.contains(&i) {
                    s.insert("g".to_string());
                }
                s
            })
            .collect();
        Dataset::new(d.features().clone(), d.labels().to_vec(), d.feature_names().to_vec(), tags)
            .unwrap()
    }

    #[test]
    fn exclude_group_partitions_in_order() {
        let d = tagged(6, &[1, 4]);
        let (inside, ood) = exclude_group(&d, "g").unwrap();
        assert_eq!(ids(&inside), vec![0, 2, 3, 5]);
        assert_eq!(ids(&ood), vec![1, 4]);
        assert_eq!(inside.len() + ood.len(), d.len());
    }

    #[test]
    fn exclude_unknown_tag() {
        let d = tagged(4, &[]);
        assert_eq!(exclude_group(&d, "g").unwrap_err(), DataError::UnknownTag("g".into()));
    }

    #[test]
    fn exclude_everything_leaves_empty_domain() {
        let d = tagged(3, &[0, 1, 2]);
        let (inside, ood) = exclude_group(&d, "g").unwrap();
        assert!(inside.is_empty());
        assert_eq!(ood.len(), 3);
    }

    #[test]
    fn corruption_identity_and_scaling() {
        let d = indexed(5);
        let same = corrupt_feature(&d, &CorruptionSpec { feature: 1, factor: 1.0 }).unwrap();
        assert_eq!(same, d);
        let big = corrupt_feature(&d, &CorruptionSpec { feature: 1, factor: 1000.0 }).unwrap();
        for r in 0..5 {
            assert_eq!(big.features().get(r, 0).to_bits(), d.features().get(r, 0).to_bits());
            assert_eq!(big.features().get(r, 1), d.features().get(r, 1) * 1000.0);
        }
        assert!(corrupt_feature(&d, &CorruptionSpec { feature: 2, factor: 10.0 }).is_err());
    }

    #[test]
    fn corruptions_commute() {
        let d = indexed(7);
        let a = CorruptionSpec { feature: 0, factor: 10.0 };
        let b = CorruptionSpec { feature: 1, factor: 1000.0 };
        let ab = corrupt_feature(&corrupt_feature(&d, &a).unwrap(), &b).unwrap();
        let ba = corrupt_feature(&corrupt_feature(&d, &b).unwrap(), &a).unwrap();
        assert_eq!(ab, ba);
    }

    #[test]
    fn grid_corners_and_center() {
        let g = grid_2d([(0.0, 1.0), (0.0, 1.0)], 2).unwrap();
        assert_eq!(g.as_slice(), &[0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let g = grid_2d([(0.0, 1.0), (0.0, 1.0)], 3).unwrap();
        assert_eq!(g.rows(), 9);
        assert_eq!(g.row(4), &[0.5, 0.5]);
        assert_eq!(grid_2d([(-5.0, 5.0), (-5.0, 5.0)], 50).unwrap().rows(), 2500);
        assert!(grid_2d([(1.0, 1.0), (0.0, 1.0)], 3).is_err());
        assert!(grid_2d([(0.0, 1.0), (0.0, 1.0)], 1).is_err());
    }
}
