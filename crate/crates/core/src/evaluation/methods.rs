use serde::{Deserialize, Serialize};

use super::{EvalError, Method};
use crate::datasets::{split_stratified, DataError, Dataset, SplitFractions, StandardScaler};
use crate::metrics::entropies;
use crate::models::{
    mc_dropout_predict, train_bootstrapped_lr, train_deep_ensemble, train_mlp, train_vae,
    vae_novelty_score, Classifier, Ensemble, LogisticConfig, LogisticModel, MlpModel, TrainConfig,
    VaeConfig, VaeModel,
};
use crate::numeric::{Matrix, SeededRng};

/// Hyperparameters for every method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub mlp: TrainConfig,
    pub logistic: LogisticConfig,
    pub vae: VaeConfig,
    pub ensemble_size: usize,
    pub mc_passes: usize,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            mlp: TrainConfig::default(),
            logistic: LogisticConfig::default(),
            vae: VaeConfig::default(),
            ensemble_size: 5,
            mc_passes: 100,
        }
    }
}

impl MethodConfig {
    /// Small networks and an unpenalised LR for the 2-D toy data.
    pub fn toy() -> Self {
        Self {
            mlp: TrainConfig::toy(),
            logistic: LogisticConfig::toy(),
            vae: VaeConfig::toy(),
            ..Self::default()
        }
    }

    /// Switches class weighting on or off for both the networks and the LR.
    pub fn with_class_weighting(mut self, on: bool) -> Self {
        self.mlp.class_weighting = on;
        self.logistic.class_weighting = on;
        self
    }
}

/// Train/validation/test partition of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Splits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

impl Splits {
    pub fn stratified(
        data: &Dataset,
        fractions: SplitFractions,
        rng: &mut SeededRng,
    ) -> Result<Self, DataError> {
        let (train, val, test) = split_stratified(data, fractions, rng)?;
        Ok(Self { train, val, test })
    }
}

/// Fitted parameters of one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MethodModel {
    SingleNn(MlpModel),
    NnEnsemble(Ensemble<MlpModel>),
    McDropout { model: MlpModel, passes: usize },
    BootstrapLr(Ensemble<LogisticModel>),
    /// The VAE ranks rows by novelty; probabilities come from a single network.
    Vae {
        vae: VaeModel,
        classifier: MlpModel,
        samples: usize,
    },
}

/// Probabilities and uncertainty for a batch of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Scores {
    pub probabilities: Vec<f64>,
    pub uncertainty: Vec<f64>,
}

/// A trained method together with the feature scaler fitted on its training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedMethod {
    pub method: Method,
    pub scaler: StandardScaler,
    pub model: MethodModel,
}

impl TrainedMethod {
    /// Fits the scaler on `train`, then trains `method` on the scaled rows.
    /// Each method draws from its own child stream of `rng`; the VAE's
    /// classifier uses the single network's stream so the two coincide.
    pub fn train(
        method: Method,
        train: &Dataset,
        val: &Dataset,
        cfg: &MethodConfig,
        rng: &SeededRng,
    ) -> Result<Self, EvalError> {
        let scaler = StandardScaler::fit(train)?;
        let train = scaler.apply(train)?;
        let val = scaler.apply(val)?;
        let val = (!val.is_empty()).then_some(&val);
        let single = || train_mlp(&train, val, &cfg.mlp, &rng.split(Method::SingleNn.as_str()));
        let stream = rng.split(method.as_str());
        let model = match method {
            Method::SingleNn => MethodModel::SingleNn(single()?),
            Method::NnEnsemble => MethodModel::NnEnsemble(train_deep_ensemble(
                &train,
                val,
                &cfg.mlp,
                cfg.ensemble_size,
                &stream,
            )?),
            Method::McDropout => MethodModel::McDropout {
                model: train_mlp(&train, val, &cfg.mlp, &stream)?,
                passes: cfg.mc_passes,
            },
            Method::BootstrapLr => MethodModel::BootstrapLr(train_bootstrapped_lr(
                &train,
                cfg.ensemble_size,
                &cfg.logistic,
                &stream,
            )?),
            Method::Vae => MethodModel::Vae {
                vae: train_vae(&train, &cfg.vae, &stream)?,
                classifier: single()?,
                samples: cfg.vae.samples,
            },
        };
        Ok(Self {
            method,
            scaler,
            model,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.scaler.means.len()
    }

    /// Probabilities and uncertainty for raw (unscaled) rows. Stochastic
    /// methods draw from a fresh child of `rng`, so equal inputs and an equal
    /// `rng` give equal scores.
    pub fn score(&self, x: &Matrix, rng: &SeededRng) -> Result<Scores, EvalError> {
        let x = self
            .scaler
            .transform(x)
            .map_err(|e| EvalError::Model(e.into()))?;
        let mut stream = rng.split(self.method.as_str());
        let (probabilities, uncertainty) = match &self.model {
            MethodModel::SingleNn(m) => with_entropy(m.predict_proba(&x)?)?,
            MethodModel::NnEnsemble(e) => with_entropy(e.predict_proba(&x)?)?,
            MethodModel::McDropout { model, passes } => {
                with_entropy(mc_dropout_predict(model, &x, *passes, &mut stream)?)?
            }
            MethodModel::BootstrapLr(e) => with_entropy(e.predict_proba(&x)?)?,
            MethodModel::Vae {
                vae,
                classifier,
                samples,
            } => (
                classifier.predict_proba(&x)?,
                vae_novelty_score(vae, &x, *samples, &mut stream)?,
            ),
        };
        Ok(Scores {
            probabilities,
            uncertainty,
        })
    }
}

fn with_entropy(p: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    let h = entropies(&p)?;
    Ok((p, h))
}

/// Trains every method in order on the same splits.
pub fn train_methods(
    methods: &[Method],
    splits: &Splits,
    cfg: &MethodConfig,
    rng: &SeededRng,
) -> Result<Vec<TrainedMethod>, EvalError> {
    methods
        .iter()
        .map(|&m| TrainedMethod::train(m, &splits.train, &splits.val, cfg, rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_toy, ToyConfig, ToyMode};

    fn toy_splits() -> Splits {
        let cfg = ToyConfig::new(ToyMode::Balanced);
        let rng = SeededRng::new(0);
        Splits {
            train: generate_toy(&cfg, &mut rng.split("train")),
            val: generate_toy(&cfg, &mut rng.split("val")),
            test: generate_toy(&cfg, &mut rng.split("test")),
        }
    }

    #[test]
    fn every_method_scores_every_row() {
        let splits = toy_splits();
        let cfg = MethodConfig {
            mc_passes: 10,
            ..MethodConfig::toy()
        };
        let trained = train_methods(&Method::ALL, &splits, &cfg, &SeededRng::new(1)).unwrap();
        for t in &trained {
            let s = t.score(splits.test.features(), &SeededRng::new(2)).unwrap();
            assert_eq!(s.probabilities.len(), splits.test.len());
            assert_eq!(s.uncertainty.len(), splits.test.len());
            assert!(s.uncertainty.iter().all(|u| u.is_finite()));
            let again = t.score(splits.test.features(), &SeededRng::new(2)).unwrap();
            assert_eq!(s, again);
        }
    }

    #[test]
    fn vae_classifier_is_the_single_network() {
        let splits = toy_splits();
        let cfg = MethodConfig::toy();
        let rng = SeededRng::new(3);
        let single = TrainedMethod::train(Method::SingleNn, &splits.train, &splits.val, &cfg, &rng).unwrap();
        let vae = TrainedMethod::train(Method::Vae, &splits.train, &splits.val, &cfg, &rng).unwrap();
        let (MethodModel::SingleNn(a), MethodModel::Vae { classifier: b, .. }) = (&single.model, &vae.model) else {
            panic!("unexpected model kinds");
        };
        assert_eq!(a, b);
    }

    #[test]
    fn weighting_switch_reaches_both_learners() {
        let cfg = MethodConfig::default().with_class_weighting(true);
        assert!(cfg.mlp.class_weighting && cfg.logistic.class_weighting);
    }
}
