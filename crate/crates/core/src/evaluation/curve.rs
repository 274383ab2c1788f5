use serde::{Deserialize, Serialize};

use super::methods::{MethodConfig, Splits, TrainedMethod};
use super::{EvalError, Method, Origin, ScoredPredictions};
use crate::metrics::{auc_roc, ece, platt_apply, platt_fit, MetricError, PlattParams, DEFAULT_BINS};
use crate::numeric::SeededRng;

/// Metrics over the `included` most certain rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub included: usize,
    /// Absent when the included rows hold a single class.
    pub auc: Option<f64>,
    pub ece: f64,
    pub positive_fraction: f64,
}

/// The fraction grid 0.50, 0.55, …, 1.00.
pub fn default_fractions() -> Vec<f64> {
    (0..=10).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

fn included_rows(fraction: f64, n: usize) -> usize {
    // guard against products such as 0.6 · 10⁴ = 6000.000000000001
    let k = (fraction * n as f64 - 1e-9).ceil() as usize;
    k.clamp(1, n)
}

/// Sorts rows by ascending uncertainty (ties keep their original order) and
/// evaluates the metrics on the first `⌈f·N⌉` rows for every `f`.
pub fn confidence_performance(
    sp: &ScoredPredictions,
    fractions: &[f64],
) -> Result<Vec<CurvePoint>, EvalError> {
    if sp.is_empty() {
        return Err(EvalError::Empty);
    }
    let pos = sp.labels().iter().filter(|&&y| y == 1).count();
    if pos == 0 || pos == sp.len() {
        return Err(EvalError::SingleClass);
    }
    if let Some(&f) = fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
        return Err(EvalError::InvalidFraction(f));
    }
    let u = sp.uncertainty();
    let mut order: Vec<usize> = (0..sp.len()).collect();
    order.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
    let probs: Vec<f64> = order.iter().map(|&i| sp.probabilities()[i]).collect();
    let labels: Vec<u8> = order.iter().map(|&i| sp.labels()[i]).collect();

    fractions
        .iter()
        .map(|&fraction| {
            let k = included_rows(fraction, sp.len());
            let (p, y) = (&probs[..k], &labels[..k]);
            let auc = match auc_roc(p, y) {
                Ok(a) => Some(a),
                Err(MetricError::SingleClass) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(CurvePoint {
                fraction,
                included: k,
                auc,
                ece: ece(p, y, DEFAULT_BINS)?,
                positive_fraction: y.iter().filter(|&&v| v == 1).count() as f64 / k as f64,
            })
        })
        .collect()
}

/// Curve of one method, with ECE after Platt scaling fitted on validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodCurve {
    pub method: Method,
    pub points: Vec<CurvePoint>,
    pub platt: PlattParams,
    /// ECE of the recalibrated probabilities at each fraction.
    pub ece_platt: Vec<f64>,
}

/// Trains each method on `splits.train`, scores `splits.test` and builds the
/// confidence-performance curve. Platt parameters are fitted once on the
/// validation predictions and applied to every prefix.
pub fn curve_experiment(
    splits: &Splits,
    methods: &[Method],
    cfg: &MethodConfig,
    fractions: &[f64],
    rng: &SeededRng,
) -> Result<Vec<MethodCurve>, EvalError> {
    let train_rng = rng.split("train");
    let score_rng = rng.split("score");
    methods
        .iter()
        .map(|&method| {
            let trained = TrainedMethod::train(method, &splits.train, &splits.val, cfg, &train_rng)?;
            let test = trained.score(splits.test.features(), &score_rng)?;
            let sp = ScoredPredictions::new(
                method,
                Origin::Test,
                test.probabilities,
                test.uncertainty,
                splits.test.labels().to_vec(),
            )?;
            let points = confidence_performance(&sp, fractions)?;

            let val = trained.score(splits.val.features(), &score_rng)?;
            let platt = platt_fit(&val.probabilities, splits.val.labels())?;
            let recalibrated = sp.with_probabilities(platt_apply(platt, sp.probabilities())?)?;
            let ece_platt = confidence_performance(&recalibrated, fractions)?
                .into_iter()
                .map(|p| p.ece)
                .collect();
            Ok(MethodCurve {
                method,
                points,
                platt,
                ece_platt,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(p: Vec<f64>, u: Vec<f64>, y: Vec<u8>) -> ScoredPredictions {
        ScoredPredictions::new(Method::SingleNn, Origin::Test, p, u, y).unwrap()
    }

    #[test]
    fn full_fraction_matches_full_set() {
        let p = vec![0.1, 0.8, 0.3, 0.6, 0.45, 0.9, 0.2];
        let y = vec![0, 1, 0, 1, 1, 1, 0];
        let u = vec![0.3, 0.1, 0.5, 0.2, 0.9, 0.05, 0.4];
        let pts = confidence_performance(&sp(p.clone(), u, y.clone()), &[1.0]).unwrap();
        assert_eq!(pts[0].included, 7);
        assert_eq!(pts[0].auc, Some(auc_roc(&p, &y).unwrap()));
        assert!((pts[0].ece - ece(&p, &y, 10).unwrap()).abs() < 1e-15);
        assert!((pts[0].positive_fraction - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn constant_uncertainty_keeps_original_order() {
        let p = vec![0.9, 0.1, 0.8, 0.2];
        let y = vec![1, 1, 0, 0];
        let pts = confidence_performance(&sp(p, vec![0.5; 4], y), &[0.5]).unwrap();
        // first two rows are both positive
        assert_eq!(pts[0].included, 2);
        assert_eq!(pts[0].auc, None);
        assert_eq!(pts[0].positive_fraction, 1.0);
    }

    #[test]
    fn errors_excluded_first() {
        // 10 correct confident rows, then 10 misranked uncertain rows
        let mut p = Vec::new();
        let mut y = Vec::new();
        let mut u = Vec::new();
        for i in 0..10 {
            y.push((i % 2) as u8);
            p.push(if i % 2 == 1 { 0.9 } else { 0.1 });
            u.push(0.1);
        }
        for i in 0..10 {
            y.push((i % 2) as u8);
            p.push(if i % 2 == 1 { 0.3 } else { 0.7 });
            u.push(0.6);
        }
        let pts = confidence_performance(&sp(p, u, y), &[0.5, 1.0]).unwrap();
        assert_eq!(pts[0].auc, Some(1.0));
        assert!(pts[1].auc.unwrap() < 1.0);
    }

    #[test]
    fn fraction_rounding() {
        assert_eq!(included_rows(0.6, 10_000), 6000);
        assert_eq!(included_rows(0.55, 7), 4);
        assert_eq!(included_rows(1e-9, 7), 1);
        assert_eq!(default_fractions().len(), 11);
        assert_eq!(default_fractions()[10], 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let s = sp(vec![0.2, 0.7], vec![0.0, 0.0], vec![0, 1]);
        assert_eq!(confidence_performance(&s, &[0.0]).unwrap_err(), EvalError::InvalidFraction(0.0));
        assert_eq!(confidence_performance(&s, &[1.5]).unwrap_err(), EvalError::InvalidFraction(1.5));
        let one = sp(vec![0.2, 0.7], vec![0.0, 0.0], vec![1, 1]);
        assert_eq!(confidence_performance(&one, &[1.0]).unwrap_err(), EvalError::SingleClass);
        let empty = sp(vec![], vec![], vec![]);
        assert_eq!(confidence_performance(&empty, &[1.0]).unwrap_err(), EvalError::Empty);
    }
}
