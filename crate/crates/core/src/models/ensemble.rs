use serde::{Deserialize, Serialize};

use super::logistic::{train_logistic, LogisticConfig, LogisticModel};
use super::mlp::{train_mlp, MlpModel, TrainConfig};
use super::{Classifier, ModelError};
use crate::datasets::{bootstrap_sample, Dataset};
use crate::numeric::{Matrix, SeededRng};

/// Homogeneous ensemble whose prediction is the mean member probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble<M> {
    members: Vec<M>,
}

impl<M: Classifier> Ensemble<M> {
    pub fn new(members: Vec<M>) -> Result<Self, ModelError> {
        let Some(first) = members.first() else {
            return Err(ModelError::EmptyEnsemble);
        };
        let dim = first.input_dim();
        if let Some(bad) = members.iter().find(|m| m.input_dim() != dim) {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                found: bad.input_dim(),
            });
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[M] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Per-member probabilities, one vector per member.
    pub fn member_predictions(&self, x: &Matrix) -> Result<Vec<Vec<f64>>, ModelError> {
        self.members.iter().map(|m| m.predict_proba(x)).collect()
    }
}

impl<M: Classifier> Classifier for Ensemble<M> {
    fn input_dim(&self) -> usize {
        self.members[0].input_dim()
    }

    fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>, ModelError> {
        let per_member = self.member_predictions(x)?;
        Ok(mean_columns(&per_member))
    }
}

/// Running mean, exact when every row is identical.
fn mean_columns(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = rows[0].clone();
    for (k, r) in rows.iter().enumerate().skip(1) {
        let weight = 1.0 / (k + 1) as f64;
        for (a, &v) in acc.iter_mut().zip(r) {
            *a += (v - *a) * weight;
        }
    }
    acc
}

/// `size` MLPs trained on the same data, each with its own init and shuffle
/// stream (`member-<k>` children of `rng`).
pub fn train_deep_ensemble(
    train: &Dataset,
    val: Option<&Dataset>,
    cfg: &TrainConfig,
    size: usize,
    rng: &SeededRng,
) -> Result<Ensemble<MlpModel>, ModelError> {
    if size == 0 {
        return Err(ModelError::EmptyEnsemble);
    }
    let members = (0..size)
        .map(|k| train_mlp(train, val, cfg, &rng.split(&format!("member-{k}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ensemble::new(members)
}

/// Mean of `passes` stochastic forward passes with dropout active.
pub fn mc_dropout_predict(
    model: &MlpModel,
    x: &Matrix,
    passes: usize,
    rng: &mut SeededRng,
) -> Result<Vec<f64>, ModelError> {
    if passes == 0 {
        return Err(ModelError::InvalidConfig(
            "MC dropout needs at least one pass".into(),
        ));
    }
    let draws = (0..passes)
        .map(|_| model.predict(x, Some(rng)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(mean_columns(&draws))
}

/// `size` logistic models, each fit on its own bootstrap resample.
pub fn train_bootstrapped_lr(
    train: &Dataset,
    size: usize,
    cfg: &LogisticConfig,
    rng: &SeededRng,
) -> Result<Ensemble<LogisticModel>, ModelError> {
    if size == 0 {
        return Err(ModelError::EmptyEnsemble);
    }
    let members = (0..size)
        .map(|k| {
            let mut member_rng = rng.split(&format!("member-{k}"));
            let sample = bootstrap_sample(train, &mut member_rng)?;
            train_logistic(&sample, cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ensemble::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_toy, ToyConfig, ToyMode};

    fn toy(seed: u64) -> Dataset {
        generate_toy(&ToyConfig::new(ToyMode::Balanced), &mut SeededRng::new(seed))
    }

    #[test]
    fn single_member_matches_model() {
        let d = toy(0);
        let m = train_mlp(&d, None, &TrainConfig::toy(), &SeededRng::new(1)).unwrap();
        let e = Ensemble::new(vec![m.clone()]).unwrap();
        assert_eq!(e.predict_proba(d.features()).unwrap(), m.predict_proba(d.features()).unwrap());
    }

    #[test]
    fn copies_of_one_model_predict_like_it() {
        let d = toy(0);
        let m = train_mlp(&d, None, &TrainConfig::toy(), &SeededRng::new(1)).unwrap();
        let e = Ensemble::new(vec![m.clone(); 5]).unwrap();
        let a = e.predict_proba(d.features()).unwrap();
        let b = m.predict_proba(d.features()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn members_differ() {
        let d = toy(0);
        let e = train_deep_ensemble(&d, None, &TrainConfig::toy(), 5, &SeededRng::new(2)).unwrap();
        assert_eq!(e.len(), 5);
        for i in 0..5 {
            for j in i + 1..5 {
                assert_ne!(e.members()[i].params_flat(), e.members()[j].params_flat());
            }
        }
    }

    #[test]
    fn mean_of_two_constant_members() {
        let lo = LogisticModel {
            weights: vec![0.0],
            bias: (0.2f64 / 0.8).ln(),
        };
        let hi = LogisticModel {
            weights: vec![0.0],
            bias: (0.8f64 / 0.2).ln(),
        };
        let e = Ensemble::new(vec![lo, hi]).unwrap();
        let p = e.predict_proba(&Matrix::zeros(3, 1)).unwrap();
        for v in p {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_or_mixed_ensembles_rejected() {
        assert_eq!(
            Ensemble::<LogisticModel>::new(vec![]).unwrap_err(),
            ModelError::EmptyEnsemble
        );
        let a = LogisticModel {
            weights: vec![0.0],
            bias: 0.0,
        };
        let b = LogisticModel {
            weights: vec![0.0, 1.0],
            bias: 0.0,
        };
        assert!(Ensemble::new(vec![a, b]).is_err());
    }

    #[test]
    fn mc_dropout_zero_rate_is_deterministic() {
        let d = toy(1);
        let cfg = TrainConfig {
            dropout: 0.0,
            ..TrainConfig::toy()
        };
        let m = train_mlp(&d, None, &cfg, &SeededRng::new(0)).unwrap();
        let plain = m.predict(d.features(), None).unwrap();
        for t in [1, 7, 100] {
            let mc = mc_dropout_predict(&m, d.features(), t, &mut SeededRng::new(4)).unwrap();
            assert_eq!(mc, plain);
        }
    }

    #[test]
    fn mc_dropout_single_pass_is_one_draw() {
        let d = toy(1);
        let m = train_mlp(&d, None, &TrainConfig::toy(), &SeededRng::new(0)).unwrap();
        let mc = mc_dropout_predict(&m, d.features(), 1, &mut SeededRng::new(4)).unwrap();
        let one = m.predict(d.features(), Some(&mut SeededRng::new(4))).unwrap();
        assert_eq!(mc, one);
    }

    #[test]
    fn bootstrap_ensemble_reproducible() {
        let d = toy(3);
        let cfg = LogisticConfig::default();
        let a = train_bootstrapped_lr(&d, 5, &cfg, &SeededRng::new(1)).unwrap();
        let b = train_bootstrapped_lr(&d, 5, &cfg, &SeededRng::new(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
    }

    #[test]
    fn bootstrap_ensemble_on_single_row() {
        let d = toy(3).select_rows(&[0]);
        let cfg = LogisticConfig {
            c: Some(1.0),
            ..LogisticConfig::default()
        };
        let e = train_bootstrapped_lr(&d, 5, &cfg, &SeededRng::new(1)).unwrap();
        for m in e.members() {
            assert_eq!(m, &e.members()[0]);
        }
    }
}
