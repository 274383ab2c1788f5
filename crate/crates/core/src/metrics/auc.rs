use super::{check_labels, MetricError};

/// Area under the ROC curve in Mann-Whitney form, computed from midranks.
/// Ties between a positive and a negative count one half.
pub fn auc_roc(scores: &[f64], labels: &[u8]) -> Result<f64, MetricError> {
    let (pos, neg) = validate(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of 1-based midranks over positives; every term is a half-integer
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        let positives = order[i..j].iter().filter(|&&k| labels[k] == 1).count();
        rank_sum += midrank * positives as f64;
        i = j;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Quadratic pair-counting reference for [`auc_roc`].
pub fn auc_roc_pairwise(scores: &[f64], labels: &[u8]) -> Result<f64, MetricError> {
    let (pos, neg) = validate(scores, labels)?;
    let mut wins = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            if si > sj {
                wins += 1.0;
            } else if si == sj {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (pos as f64 * neg as f64))
}

fn validate(scores: &[f64], labels: &[u8]) -> Result<(usize, usize), MetricError> {
    let pos = check_labels(scores.len(), labels)?;
    if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricError::NonFinite { index });
    }
    if scores.is_empty() {
        return Err(MetricError::Empty);
    }
    let neg = scores.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(MetricError::SingleClass);
    }
    Ok((pos, neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(auc_roc(&[0.1, 0.9], &[0, 1]).unwrap(), 1.0);
        assert_eq!(auc_roc(&[0.3; 6], &[0, 1, 0, 1, 1, 0]).unwrap(), 0.5);
        assert_eq!(auc_roc(&[0.2, 0.4, 0.4, 0.8], &[0, 1, 0, 1]).unwrap(), 0.875);
    }

    #[test]
    fn errors() {
        assert_eq!(auc_roc(&[0.1, 0.2], &[1, 1]), Err(MetricError::SingleClass));
        assert_eq!(auc_roc(&[], &[]), Err(MetricError::Empty));
        assert!(matches!(
            auc_roc(&[0.1], &[0, 1]),
            Err(MetricError::LengthMismatch { .. })
        ));
        assert!(matches!(
            auc_roc(&[0.1, f64::NAN], &[0, 1]),
            Err(MetricError::NonFinite { index: 1 })
        ));
        assert!(matches!(
            auc_roc(&[0.1, 0.2], &[0, 2]),
            Err(MetricError::InvalidLabel { .. })
        ));
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
        (2usize..=200).prop_flat_map(|n| {
            (
                // a coarse grid so ties are common
                prop::collection::vec((0i32..20).prop_map(|k| k as f64 / 4.0), n),
                prop::collection::vec(0u8..=1, n),
            )
        })
    }

    proptest! {
        #[test]
        fn matches_pairwise_oracle((scores, labels) in instance()) {
            let fast = auc_roc(&scores, &labels);
            let slow = auc_roc_pairwise(&scores, &labels);
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn invariant_under_increasing_transform((scores, labels) in instance()) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let moved: Vec<f64> = scores.iter().map(|s| (2.0 * s).exp() - 3.0).collect();
            prop_assert_eq!(auc_roc(&scores, &labels).unwrap(), auc_roc(&moved, &labels).unwrap());
        }

        #[test]
        fn negation_complements(n in 2usize..100, seed in any::<u64>()) {
            let mut rng = crate::numeric::SeededRng::new(seed);
            let scores: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let total = auc_roc(&scores, &labels).unwrap() + auc_roc(&neg, &labels).unwrap();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
