use serde::{Deserialize, Serialize};

use super::{check_labels, check_probs, MetricError};
use crate::numeric::sigmoid;

/// Probabilities are clamped to `[PLATT_CLAMP, 1 − PLATT_CLAMP]` before the logit.
pub const PLATT_CLAMP: f64 = 1e-6;
const TOLERANCE: f64 = 1e-8;
const MAX_ITERATIONS: usize = 200;

/// Recalibration `p ↦ sigmoid(a·logit(p) + b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlattParams {
    pub a: f64,
    pub b: f64,
}

impl Default for PlattParams {
    fn default() -> Self {
        Self { a: 1.0, b: 0.0 }
    }
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(PLATT_CLAMP, 1.0 - PLATT_CLAMP);
    (p / (1.0 - p)).ln()
}

fn mean_bce(z: &[f64], labels: &[u8], params: PlattParams) -> f64 {
    let total: f64 = z
        .iter()
        .zip(labels)
        .map(|(&zi, &y)| {
            // ln(1 + e^t) − y·t, written to avoid overflow
            let t = params.a * zi + params.b;
            let softplus = t.max(0.0) + (-t.abs()).exp().ln_1p();
            softplus - f64::from(y) * t
        })
        .sum();
    total / z.len() as f64
}

/// Fits `(a, b)` by minimising the mean BCE on held-out predictions, using
/// damped Newton steps with backtracking. Stops once the gradient norm drops
/// below 1e-8.
pub fn platt_fit(val_probs: &[f64], val_labels: &[u8]) -> Result<PlattParams, MetricError> {
    check_probs(val_probs)?;
    let pos = check_labels(val_probs.len(), val_labels)?;
    if val_probs.is_empty() {
        return Err(MetricError::Empty);
    }
    if pos == 0 || pos == val_probs.len() {
        return Err(MetricError::SingleClass);
    }
    let z: Vec<f64> = val_probs.iter().map(|&p| logit(p)).collect();
    let n = z.len() as f64;
    let mut params = PlattParams::default();
    let mut loss = mean_bce(&z, val_labels, params);
    for _ in 0..MAX_ITERATIONS {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&zi, &y) in z.iter().zip(val_labels) {
            let s = sigmoid(params.a * zi + params.b);
            let r = s - f64::from(y);
            let w = s * (1.0 - s);
            ga += r * zi / n;
            gb += r / n;
            haa += w * zi * zi / n;
            hab += w * zi / n;
            hbb += w / n;
        }
        if ga.hypot(gb) < TOLERANCE {
            break;
        }
        // small ridge keeps the system solvable when every logit is equal
        let ridge = 1e-10;
        let (haa, hbb) = (haa + ridge, hbb + ridge);
        let det = haa * hbb - hab * hab;
        let (mut da, mut db) = if det > 0.0 {
            ((hbb * ga - hab * gb) / det, (haa * gb - hab * ga) / det)
        } else {
            (ga, gb)
        };
        let mut improved = false;
        for _ in 0..50 {
            let trial = PlattParams {
                a: params.a - da,
                b: params.b - db,
            };
            let trial_loss = mean_bce(&z, val_labels, trial);
            if trial_loss <= loss {
                params = trial;
                loss = trial_loss;
                improved = true;
                break;
            }
            da *= 0.5;
            db *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok(params)
}

pub fn platt_apply(params: PlattParams, probs: &[f64]) -> Result<Vec<f64>, MetricError> {
    check_probs(probs)?;
    Ok(probs
        .iter()
        .map(|&p| sigmoid(params.a * logit(p) + params.b))
        .collect())
}
