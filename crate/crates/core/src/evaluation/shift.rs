use serde::{Deserialize, Serialize};

use super::methods::{MethodConfig, Splits, TrainedMethod};
use super::sweep::mean_std;
use super::{EvalError, Method};
use crate::datasets::{corrupt_feature, exclude_group, CorruptionSpec, Dataset, SplitFractions};
use crate::metrics::{auc_roc, MetricError};
use crate::numeric::SeededRng;

/// AUC of the uncertainty score at separating shifted rows (label 1) from
/// in-domain rows (label 0).
pub fn detection_auc(in_domain: &[f64], shifted: &[f64]) -> Result<f64, EvalError> {
    let scores: Vec<f64> = in_domain.iter().chain(shifted).copied().collect();
    let labels: Vec<u8> = std::iter::repeat_n(0, in_domain.len())
        .chain(std::iter::repeat_n(1, shifted.len()))
        .collect();
    Ok(auc_roc(&scores, &labels)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub tag: String,
    pub method: Method,
    pub detection_auc: f64,
    /// Classifier AUC on the held-out group; absent for the VAE and for a
    /// single-class group.
    pub subgroup_auc: Option<f64>,
    pub n_test: usize,
    pub n_ood: usize,
}

/// Holds out every row tagged `tag`, trains on the rest and measures how well
/// uncertainty separates the held-out rows from the in-domain test split.
pub fn ood_experiment(
    data: &Dataset,
    tag: &str,
    method: Method,
    cfg: &MethodConfig,
    rng: &SeededRng,
) -> Result<DetectionResult, EvalError> {
    let mut results = ood_experiment_methods(data, tag, &[method], cfg, SplitFractions::default(), rng)?;
    Ok(results.remove(0))
}

/// [`ood_experiment`] for several methods sharing one split.
pub fn ood_experiment_methods(
    data: &Dataset,
    tag: &str,
    methods: &[Method],
    cfg: &MethodConfig,
    fractions: SplitFractions,
    rng: &SeededRng,
) -> Result<Vec<DetectionResult>, EvalError> {
    let (in_domain, ood) = exclude_group(data, tag)?;
    let splits = Splits::stratified(&in_domain, fractions, &mut rng.split("split"))?;
    let train_rng = rng.split("train");
    let score_rng = rng.split("score");
    methods
        .iter()
        .map(|&method| {
            let trained = TrainedMethod::train(method, &splits.train, &splits.val, cfg, &train_rng)?;
            let test = trained.score(splits.test.features(), &score_rng)?;
            let shifted = trained.score(ood.features(), &score_rng)?;
            let subgroup_auc = if method.has_classifier() {
                match auc_roc(&shifted.probabilities, ood.labels()) {
                    Ok(a) => Some(a),
                    Err(MetricError::SingleClass) => None,
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            Ok(DetectionResult {
                tag: tag.to_string(),
                method,
                detection_auc: detection_auc(&test.uncertainty, &shifted.uncertainty)?,
                subgroup_auc,
                n_test: splits.test.len(),
                n_ood: ood.len(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionResult {
    pub method: Method,
    pub factor: f64,
    /// Corrupted feature indices, in sampling order.
    pub features: Vec<usize>,
    /// Detection AUC for each corrupted feature.
    pub aucs: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation over features; absent for a single feature.
    pub std: Option<f64>,
}

/// For `n_features` columns drawn without replacement (all columns when the
/// data has fewer), multiplies the column by each factor and measures how
/// well each method's uncertainty separates the perturbed copy from the
/// clean test rows.
pub fn corruption_experiment(
    trained: &[TrainedMethod],
    test: &Dataset,
    factors: &[f64],
    n_features: usize,
    rng: &SeededRng,
) -> Result<Vec<CorruptionResult>, EvalError> {
    if test.is_empty() {
        return Err(EvalError::Empty);
    }
    if n_features == 0 {
        return Err(EvalError::InvalidConfig("n_features must be ≥ 1".into()));
    }
    let features = rng.split("features").sample_indices(test.n_features(), n_features);
    let score_rng = rng.split("score");
    let mut out = Vec::with_capacity(trained.len() * factors.len());
    for t in trained {
        let clean = t.score(test.features(), &score_rng)?.uncertainty;
        for &factor in factors {
            let aucs = features
                .iter()
                .map(|&feature| {
                    let perturbed = corrupt_feature(test, &CorruptionSpec { feature, factor })?;
                    let shifted = t.score(perturbed.features(), &score_rng)?.uncertainty;
                    detection_auc(&clean, &shifted)
                })
                .collect::<Result<Vec<_>, EvalError>>()?;
            let (mean, std) = mean_std(&aucs);
            out.push(CorruptionResult {
                method: t.method,
                factor,
                features: features.clone(),
                aucs,
                mean: mean.expect("at least one feature"),
                std,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{generate_synthetic, GroupSpec, SyntheticConfig};

    #[test]
    fn detection_examples() {
        assert_eq!(detection_auc(&[0.1, 0.2], &[0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(detection_auc(&[0.2, 0.2], &[0.2, 0.2]).unwrap(), 0.5);
        let a = detection_auc(&[0.1, 0.5, 0.3], &[0.4, 0.2]).unwrap();
        let b = detection_auc(&[0.4, 0.2], &[0.1, 0.5, 0.3]).unwrap();
        assert!((a + b - 1.0).abs() < 1e-15);
    }

    fn small_data(shift: f64) -> Dataset {
        let cfg = SyntheticConfig {
            n_rows: 1500,
            n_features: 4,
            informative: 2,
            separation: 1.0,
            positive_fraction: 0.3,
            groups: vec![GroupSpec {
                tag: "g".into(),
                fraction: 0.15,
                shift: vec![(0, shift), (1, shift)],
            }],
        };
        generate_synthetic(&cfg, &mut SeededRng::new(9)).unwrap()
    }

    fn quick() -> MethodConfig {
        let mut cfg = MethodConfig::default();
        cfg.mlp.hidden = vec![8];
        cfg.mlp.max_epochs = 10;
        cfg.mlp.batch_size = 64;
        cfg.vae.latent_dim = 2;
        cfg.vae.batch_size = 64;
        cfg.ensemble_size = 2;
        cfg.mc_passes = 5;
        cfg
    }

    #[test]
    fn ood_runs_and_is_reproducible() {
        let d = small_data(3.0);
        let rng = SeededRng::new(1);
        let a = ood_experiment_methods(&d, "g", &Method::ALL, &quick(), SplitFractions::default(), &rng).unwrap();
        let b = ood_experiment_methods(&d, "g", &Method::ALL, &quick(), SplitFractions::default(), &rng).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!((0.0..=1.0).contains(&r.detection_auc));
            assert_eq!(r.subgroup_auc.is_some(), r.method != Method::Vae);
            assert_eq!(r.n_ood, d.tag_counts()["g"]);
        }
        let vae = a.iter().find(|r| r.method == Method::Vae).unwrap();
        assert!(vae.detection_auc > 0.8, "{vae:?}");
    }

    #[test]
    fn missing_tag_is_an_error() {
        let d = small_data(0.0);
        assert!(ood_experiment(&d, "nope", Method::SingleNn, &quick(), &SeededRng::new(0)).is_err());
    }

    #[test]
    fn unit_factor_gives_exact_half() {
        let d = small_data(0.0);
        let splits = Splits::stratified(&d, SplitFractions::default(), &mut SeededRng::new(2)).unwrap();
        let trained = super::super::train_methods(&Method::ALL, &splits, &quick(), &SeededRng::new(3)).unwrap();
        let res = corruption_experiment(&trained, &splits.test, &[1.0, 1000.0], 3, &SeededRng::new(4)).unwrap();
        assert_eq!(res.len(), 10);
        for r in &res {
            assert_eq!(r.features.len(), 3);
            if r.factor == 1.0 {
                assert!(r.aucs.iter().all(|&a| a == 0.5), "{r:?}");
                assert_eq!(r.std, Some(0.0));
            }
        }
        let again = corruption_experiment(&trained, &splits.test, &[1.0, 1000.0], 3, &SeededRng::new(4)).unwrap();
        assert_eq!(res, again);
        // asking for more columns than exist samples all of them
        let all = corruption_experiment(&trained[..1], &splits.test, &[10.0], 30, &SeededRng::new(4)).unwrap();
        assert_eq!(all[0].features.len(), 4);
    }
}
