//! Experiment configuration: one JSON document with embedded defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use uq_core::datasets::{GroupSpec, SplitFractions, SyntheticConfig, ToyMode};
use uq_core::evaluation::{default_fractions, Method, MethodConfig, TOY_BOUNDS};

use crate::RunError;

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Toy(ToyMode),
    Synthetic,
    Csv(PathBuf),
}

impl DataSource {
    pub fn is_toy(&self) -> bool {
        matches!(self, DataSource::Toy(_))
    }
}

impl FromStr for DataSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toy-balanced" => Ok(DataSource::Toy(ToyMode::Balanced)),
            "toy-unbalanced" => Ok(DataSource::Toy(ToyMode::Unbalanced)),
            "synthetic" => Ok(DataSource::Synthetic),
            _ => match s.strip_prefix("csv:") {
                Some(path) if !path.is_empty() => Ok(DataSource::Csv(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown dataset `{s}`; expected toy-balanced, toy-unbalanced, synthetic or csv:<path>"
                )),
            },
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Toy(ToyMode::Balanced) => f.write_str("toy-balanced"),
            DataSource::Toy(ToyMode::Unbalanced) => f.write_str("toy-unbalanced"),
            DataSource::Synthetic => f.write_str("synthetic"),
            DataSource::Csv(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Experiment {
    Curve,
    Ood(String),
    Corrupt,
    Surfaces,
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Curve => "curve",
            Experiment::Ood(_) => "ood",
            Experiment::Corrupt => "corrupt",
            Experiment::Surfaces => "surfaces",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "curve" => Ok(Experiment::Curve),
            "corrupt" => Ok(Experiment::Corrupt),
            "surfaces" => Ok(Experiment::Surfaces),
            _ => match s.strip_prefix("ood:") {
                Some(tag) if !tag.is_empty() => Ok(Experiment::Ood(tag.to_string())),
                _ => Err(format!(
                    "unknown experiment `{s}`; expected curve, ood:<tag>, corrupt or surfaces"
                )),
            },
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Experiment::Ood(tag) => write!(f, "ood:{tag}"),
            other => f.write_str(other.kind()),
        }
    }
}

/// Network settings; unset fields take the dataset's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSettings {
    pub hidden: Option<Vec<usize>>,
    pub dropout: Option<f64>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub max_epochs: Option<usize>,
    /// Epochs without validation improvement before stopping; 0 disables.
    pub patience: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogisticSettings {
    /// Inverse penalty strength; 0 means no penalty.
    pub c: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VaeSettings {
    pub latent_dim: Option<usize>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToySettings {
    pub n_train: usize,
    pub n_test: usize,
}

impl Default for ToySettings {
    fn default() -> Self {
        Self {
            n_train: 200,
            n_test: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorruptSettings {
    pub factors: Vec<f64>,
    pub n_features: usize,
}

impl Default for CorruptSettings {
    fn default() -> Self {
        Self {
            factors: vec![10.0, 1000.0],
            n_features: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSettings {
    pub resolution: usize,
    pub bounds: [(f64, f64); 2],
}

impl Default for SurfaceSettings {
    fn default() -> Self {
        Self {
            resolution: 100,
            bounds: TOY_BOUNDS,
        }
    }
}

fn default_methods() -> Vec<String> {
    Method::ALL.iter().map(|m| m.as_str().to_string()).collect()
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

fn default_label_column() -> String {
    "label".into()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Churn-like data with a null group (`random`) and a group shifted by 3σ
/// on two features (`emergency`).
pub fn default_synthetic() -> SyntheticConfig {
    SyntheticConfig {
        groups: vec![
            GroupSpec {
                tag: "random".into(),
                fraction: 0.1,
                shift: Vec::new(),
            },
            GroupSpec {
                tag: "emergency".into(),
                fraction: 0.1,
                shift: vec![(0, 3.0), (1, 3.0)],
            },
        ],
        ..SyntheticConfig::default()
    }
}

fn default_ensemble_size() -> usize {
    5
}

fn default_mc_passes() -> usize {
    100
}

/// The document as written by the user, with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub dataset: String,
    pub experiment: String,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default)]
    pub class_weighting: bool,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_label_column")]
    pub label_column: String,
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default)]
    pub split: SplitFractions,
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    #[serde(default = "default_mc_passes")]
    pub mc_passes: usize,
    #[serde(default)]
    pub mlp: MlpSettings,
    #[serde(default)]
    pub logistic: LogisticSettings,
    #[serde(default)]
    pub vae: VaeSettings,
    #[serde(default)]
    pub toy: ToySettings,
    #[serde(default = "default_synthetic")]
    pub synthetic: SyntheticConfig,
    #[serde(default)]
    pub corrupt: CorruptSettings,
    #[serde(default)]
    pub surfaces: SurfaceSettings,
}

/// A validated configuration ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub raw: RawConfig,
    pub dataset: DataSource,
    pub experiment: Experiment,
    pub methods: Vec<Method>,
    pub models: MethodConfig,
}

fn config_error(key: &str, message: impl fmt::Display) -> RunError {
    RunError::Config(format!("{key}: {message}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, RunError> {
        let dataset: DataSource = raw.dataset.parse().map_err(|e| config_error("dataset", e))?;
        let experiment: Experiment = raw
            .experiment
            .parse()
            .map_err(|e| config_error("experiment", e))?;
        if raw.methods.is_empty() {
            return Err(config_error("methods", "at least one method is required"));
        }
        let mut methods = Vec::with_capacity(raw.methods.len());
        for name in &raw.methods {
            let m: Method = name.parse().map_err(|e| config_error("methods", e))?;
            if methods.contains(&m) {
                return Err(config_error("methods", format!("`{name}` is listed twice")));
            }
            methods.push(m);
        }
        if raw.seeds.is_empty() {
            return Err(config_error("seeds", "at least one seed is required"));
        }
        if raw.fractions.is_empty() {
            return Err(config_error("fractions", "at least one fraction is required"));
        }
        if let Some(f) = raw.fractions.iter().find(|f| !(**f > 0.0 && **f <= 1.0)) {
            return Err(config_error("fractions", format!("{f} is outside (0, 1]")));
        }
        if raw.ensemble_size == 0 {
            return Err(config_error("ensemble_size", "must be ≥ 1"));
        }
        if raw.mc_passes == 0 {
            return Err(config_error("mc_passes", "must be ≥ 1"));
        }
        if raw.toy.n_train < 2 || raw.toy.n_test < 2 {
            return Err(config_error("toy", "n_train and n_test must be ≥ 2"));
        }
        if raw.corrupt.factors.is_empty() || raw.corrupt.factors.iter().any(|f| !f.is_finite()) {
            return Err(config_error("corrupt.factors", "need at least one finite factor"));
        }
        if raw.corrupt.n_features == 0 {
            return Err(config_error("corrupt.n_features", "must be ≥ 1"));
        }
        raw.split
            .validate()
            .map_err(|e| config_error("split", e))?;
        if raw.surfaces.resolution < 2 {
            return Err(config_error("surfaces.resolution", "must be ≥ 2"));
        }
        let models = resolve_models(&raw, dataset.is_toy())?;
        Ok(Self {
            raw,
            dataset,
            experiment,
            methods,
            models,
        })
    }
}

fn resolve_models(raw: &RawConfig, toy: bool) -> Result<MethodConfig, RunError> {
    let mut cfg = if toy {
        MethodConfig::toy()
    } else {
        MethodConfig::default()
    };
    cfg.ensemble_size = raw.ensemble_size;
    cfg.mc_passes = raw.mc_passes;

    let m = &raw.mlp;
    if let Some(h) = &m.hidden {
        if h.contains(&0) {
            return Err(config_error("mlp.hidden", "layer sizes must be ≥ 1"));
        }
        cfg.mlp.hidden = h.clone();
    }
    if let Some(d) = m.dropout {
        if !(0.0..1.0).contains(&d) {
            return Err(config_error("mlp.dropout", "must lie in [0, 1)"));
        }
        cfg.mlp.dropout = d;
    }
    if let Some(lr) = m.learning_rate {
        cfg.mlp.adam.lr = positive("mlp.learning_rate", lr)?;
    }
    if let Some(b) = m.batch_size {
        cfg.mlp.batch_size = at_least_one("mlp.batch_size", b)?;
    }
    if let Some(e) = m.max_epochs {
        cfg.mlp.max_epochs = at_least_one("mlp.max_epochs", e)?;
    }
    if let Some(p) = m.patience {
        cfg.mlp.early_stopping = (p > 0).then_some(p);
    }

    let l = &raw.logistic;
    if let Some(c) = l.c {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(config_error("logistic.c", "must be ≥ 0"));
        }
        cfg.logistic.c = (c > 0.0).then_some(c);
    }
    if let Some(t) = l.tolerance {
        cfg.logistic.tolerance = positive("logistic.tolerance", t)?;
    }
    if let Some(i) = l.max_iterations {
        cfg.logistic.max_iterations = at_least_one("logistic.max_iterations", i)?;
    }

    let v = &raw.vae;
    if let Some(d) = v.latent_dim {
        cfg.vae.latent_dim = at_least_one("vae.latent_dim", d)?;
    }
    if let Some(b) = v.batch_size {
        cfg.vae.batch_size = at_least_one("vae.batch_size", b)?;
    }
    if let Some(e) = v.epochs {
        cfg.vae.epochs = at_least_one("vae.epochs", e)?;
    }
    if let Some(lr) = v.learning_rate {
        cfg.vae.adam.lr = positive("vae.learning_rate", lr)?;
    }
    if let Some(s) = v.samples {
        cfg.vae.samples = at_least_one("vae.samples", s)?;
    }
    Ok(cfg.with_class_weighting(raw.class_weighting))
}

fn positive(key: &str, v: f64) -> Result<f64, RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_error(key, format!("must be positive, got {v}")))
    }
}

fn at_least_one(key: &str, v: usize) -> Result<usize, RunError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(config_error(key, "must be ≥ 1"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = ExperimentConfig::from_json(r#"{"dataset": "toy-balanced", "experiment": "curve"}"#).unwrap();
        assert_eq!(c.methods, Method::ALL.to_vec());
        assert_eq!(c.raw.seeds, vec![0, 1, 2, 3, 4]);
        assert_eq!(c.models, MethodConfig::toy());
        assert_eq!(c.raw.fractions, default_fractions());
    }

    #[test]
    fn real_data_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"dataset": "csv:data.csv", "experiment": "ood:emergency", "class_weighting": true}"#,
        )
        .unwrap();
        assert_eq!(c.dataset, DataSource::Csv("data.csv".into()));
        assert_eq!(c.experiment, Experiment::Ood("emergency".into()));
        assert_eq!(c.models, MethodConfig::default().with_class_weighting(true));
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = ExperimentConfig::from_json(r#"{"dataset": "toy-balanced", "experiment": "curve", "colour": 1}"#)
            .unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"dataset": "toy-balanced", "experiment": "curve", "mlp": {"width": 3}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("width"), "{e}");
    }

    #[test]
    fn unknown_method_is_echoed() {
        let e = ExperimentConfig::from_json(
            r#"{"dataset": "toy-balanced", "experiment": "curve", "methods": ["random-forest"]}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("random-forest"), "{e}");
        assert_eq!(e.exit_code(), 1);
    }

    #[test]
    fn overrides_apply() {
        let c = ExperimentConfig::from_json(
            r#"{"dataset": "synthetic", "experiment": "corrupt",
                "mlp": {"hidden": [8], "patience": 0}, "logistic": {"c": 0}, "vae": {"latent_dim": 4}}"#,
        )
        .unwrap();
        assert_eq!(c.models.mlp.hidden, vec![8]);
        assert_eq!(c.models.mlp.early_stopping, None);
        assert_eq!(c.models.logistic.c, None);
        assert_eq!(c.models.vae.latent_dim, 4);
    }

    #[test]
    fn invalid_values_rejected() {
        for body in [
            r#""dataset": "parquet:x", "experiment": "curve""#,
            r#""dataset": "toy-balanced", "experiment": "ood:""#,
            r#""dataset": "toy-balanced", "experiment": "curve", "seeds": []"#,
            r#""dataset": "toy-balanced", "experiment": "curve", "methods": []"#,
            r#""dataset": "toy-balanced", "experiment": "curve", "fractions": [0.0]"#,
            r#""dataset": "toy-balanced", "experiment": "curve", "mlp": {"dropout": 1.0}"#,
            r#""experiment": "curve""#,
        ] {
            let e = ExperimentConfig::from_json(&format!("{{{body}}}")).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{body}");
        }
    }
}
