use crate::numeric::sigmoid;

const PROB_CLAMP: f64 = 1e-12;

/// Positive-class weight `N⁻ / N⁺` for one batch. A batch without positives
/// gets weight 0; its weighted term is empty anyway.
pub fn batch_positive_weight(labels: &[u8]) -> f64 {
    let pos = labels.iter().filter(|&&y| y == 1).count();
    if pos == 0 {
        0.0
    } else {
        (labels.len() - pos) as f64 / pos as f64
    }
}

/// Mean class-weighted binary cross-entropy over a batch. With `weighting`
/// the positive weight is [`batch_positive_weight`], otherwise 1.
pub fn weighted_bce_loss(probs: &[f64], labels: &[u8], weighting: bool) -> f64 {
    let w = if weighting {
        batch_positive_weight(labels)
    } else {
        1.0
    };
    weighted_bce(probs, labels, w)
}

/// `-(1/N) Σ [w⁺·y·ln ŷ + (1−y)·ln(1−ŷ)]`, probabilities clamped to
/// `[1e-12, 1 − 1e-12]`.
pub fn weighted_bce(probs: &[f64], labels: &[u8], positive_weight: f64) -> f64 {
    debug_assert_eq!(probs.len(), labels.len());
    if probs.is_empty() {
        return 0.0;
    }
    let total: f64 = probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            if y == 1 {
                -positive_weight * p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    total / probs.len() as f64
}

/// Gradient of [`weighted_bce`] with respect to the pre-sigmoid logits.
pub fn weighted_bce_logit_grad(logits: &[f64], labels: &[u8], positive_weight: f64) -> Vec<f64> {
    let n = logits.len() as f64;
    logits
        .iter()
        .zip(labels)
        .map(|(&z, &y)| {
            let s = sigmoid(z);
            if y == 1 {
                positive_weight * (s - 1.0) / n
            } else {
                s / n
            }
        })
        .collect()
}
