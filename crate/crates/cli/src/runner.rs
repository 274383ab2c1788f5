//! Dataset → train → evaluate pipelines for each experiment kind.

use std::collections::BTreeMap;
use std::path::PathBuf;

use uq_core::datasets::{
    generate_synthetic, generate_toy, grid_2d, load_csv, DataError, Dataset, ToyConfig,
};
use uq_core::evaluation::{
    corruption_experiment, curve_experiment, ood_experiment_methods, seed_sweep, toy_surfaces,
    train_methods, EvalError, Method, MetricKey, Observation, Splits, SurfacePoint,
};
use uq_core::models::ModelError;
use uq_core::numeric::SeededRng;

use crate::config::{DataSource, Experiment, ExperimentConfig};
use crate::output::{self, ResultRecord};
use crate::RunError;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed_override: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub records: Vec<ResultRecord>,
    /// Surface files written, if any.
    pub surface_files: Vec<PathBuf>,
}

fn eval_error(e: EvalError) -> RunError {
    match e {
        EvalError::Seed { seed, source } => match eval_error(*source) {
            RunError::Config(m) => RunError::Config(format!("seed {seed}: {m}")),
            RunError::Data(m) => RunError::Data(format!("seed {seed}: {m}")),
            RunError::Training(m) => RunError::Training(format!("seed {seed}: {m}")),
        },
        EvalError::UnknownMethod(_) | EvalError::InvalidConfig(_) => RunError::Config(e.to_string()),
        EvalError::Model(ModelError::Data(_)) | EvalError::Data(_) => RunError::Data(e.to_string()),
        EvalError::Model(_) => RunError::Training(e.to_string()),
        EvalError::Empty
        | EvalError::LengthMismatch { .. }
        | EvalError::SingleClass
        | EvalError::InvalidFraction(_)
        | EvalError::Metric(_) => RunError::Data(e.to_string()),
    }
}

fn data_error(e: DataError) -> RunError {
    RunError::Data(e.to_string())
}

/// Per-seed data: fixed CSV rows, or freshly generated synthetic rows.
enum Source {
    Toy(ToyConfig, ToyConfig),
    Synthetic,
    Rows(Dataset),
}

impl Source {
    fn load(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        Ok(match &cfg.dataset {
            DataSource::Toy(mode) => {
                let train = ToyConfig {
                    mode: *mode,
                    n_train: cfg.raw.toy.n_train,
                };
                let test = ToyConfig {
                    n_train: cfg.raw.toy.n_test,
                    ..train.clone()
                };
                Source::Toy(train, test)
            }
            DataSource::Synthetic => Source::Synthetic,
            DataSource::Csv(path) => Source::Rows(load_csv(path, &cfg.raw.label_column).map_err(data_error)?),
        })
    }

    fn n_features(&self, cfg: &ExperimentConfig) -> usize {
        match self {
            Source::Toy(..) => 2,
            Source::Synthetic => cfg.raw.synthetic.n_features,
            Source::Rows(d) => d.n_features(),
        }
    }

    fn dataset(&self, cfg: &ExperimentConfig, rng: &SeededRng) -> Result<Dataset, EvalError> {
        match self {
            Source::Toy(train, _) => Ok(generate_toy(train, &mut rng.split("data"))),
            Source::Synthetic => Ok(generate_synthetic(&cfg.raw.synthetic, &mut rng.split("data"))?),
            Source::Rows(d) => Ok(d.clone()),
        }
    }

    /// Toy data draws independent train, validation and test sets; other
    /// sources are split with stratification.
    fn splits(&self, cfg: &ExperimentConfig, rng: &SeededRng) -> Result<Splits, EvalError> {
        match self {
            Source::Toy(train, test) => {
                let data = rng.split("data");
                Ok(Splits {
                    train: generate_toy(train, &mut data.split("train")),
                    val: generate_toy(train, &mut data.split("val")),
                    test: generate_toy(test, &mut data.split("test")),
                })
            }
            _ => {
                let d = self.dataset(cfg, rng)?;
                Ok(Splits::stratified(&d, cfg.raw.split, &mut rng.split("split"))?)
            }
        }
    }
}

fn obs(method: Method, context: impl Into<String>, metric: &str, value: Option<f64>) -> Observation {
    Observation::new(MetricKey::new(method, context, metric), value)
}

fn count(v: usize) -> Option<f64> {
    Some(v as f64)
}

type Surfaces = BTreeMap<(u64, Method), Vec<SurfacePoint>>;

fn run_seed(
    cfg: &ExperimentConfig,
    source: &Source,
    seed: u64,
    rng: &SeededRng,
    surfaces: &mut Surfaces,
) -> Result<Vec<Observation>, EvalError> {
    let mut out = Vec::new();
    match &cfg.experiment {
        Experiment::Curve => {
            let splits = source.splits(cfg, rng)?;
            let curves = curve_experiment(&splits, &cfg.methods, &cfg.models, &cfg.raw.fractions, &rng.split("curve"))?;
            for c in curves {
                out.push(obs(c.method, "platt", "platt_a", Some(c.platt.a)));
                out.push(obs(c.method, "platt", "platt_b", Some(c.platt.b)));
                for (p, ece_platt) in c.points.iter().zip(&c.ece_platt) {
                    let ctx = format!("fraction={:.2}", p.fraction);
                    out.push(obs(c.method, ctx.clone(), "included", count(p.included)));
                    out.push(obs(c.method, ctx.clone(), "auc", p.auc));
                    out.push(obs(c.method, ctx.clone(), "ece", Some(p.ece)));
                    out.push(obs(c.method, ctx.clone(), "ece_platt", Some(*ece_platt)));
                    out.push(obs(c.method, ctx, "positive_fraction", Some(p.positive_fraction)));
                }
            }
        }
        Experiment::Ood(tag) => {
            let data = source.dataset(cfg, rng)?;
            let results = ood_experiment_methods(&data, tag, &cfg.methods, &cfg.models, cfg.raw.split, &rng.split("ood"))?;
            for r in results {
                let ctx = format!("group={tag}");
                out.push(obs(r.method, ctx.clone(), "detection_auc", Some(r.detection_auc)));
                out.push(obs(r.method, ctx.clone(), "subgroup_auc", r.subgroup_auc));
                out.push(obs(r.method, ctx.clone(), "n_test", count(r.n_test)));
                out.push(obs(r.method, ctx, "n_ood", count(r.n_ood)));
            }
        }
        Experiment::Corrupt => {
            let splits = source.splits(cfg, rng)?;
            let trained = train_methods(&cfg.methods, &splits, &cfg.models, &rng.split("train"))?;
            let results = corruption_experiment(
                &trained,
                &splits.test,
                &cfg.raw.corrupt.factors,
                cfg.raw.corrupt.n_features,
                &rng.split("corrupt"),
            )?;
            for r in results {
                let ctx = format!("factor={}", r.factor);
                out.push(obs(r.method, ctx.clone(), "detection_auc_mean", Some(r.mean)));
                out.push(obs(r.method, ctx.clone(), "detection_auc_std", r.std));
                for (f, auc) in r.features.iter().zip(&r.aucs) {
                    out.push(obs(r.method, format!("{ctx}/feature={f}"), "detection_auc", Some(*auc)));
                }
            }
        }
        Experiment::Surfaces => {
            let splits = source.splits(cfg, rng)?;
            let grid = grid_2d(cfg.raw.surfaces.bounds, cfg.raw.surfaces.resolution)?;
            let trained = train_methods(&cfg.methods, &splits, &cfg.models, &rng.split("train"))?;
            for t in &trained {
                let points = toy_surfaces(t, &grid, &rng.split("surfaces"))?;
                let n = points.len() as f64;
                let entropy = points.iter().map(|p| p.entropy);
                out.push(obs(t.method, "grid", "points", count(points.len())));
                out.push(obs(t.method, "grid", "mean_probability", Some(points.iter().map(|p| p.probability).sum::<f64>() / n)));
                out.push(obs(t.method, "grid", "mean_entropy", Some(entropy.clone().sum::<f64>() / n)));
                out.push(obs(t.method, "grid", "max_entropy", entropy.clone().reduce(f64::max)));
                out.push(obs(t.method, "grid", "min_entropy", entropy.reduce(f64::min)));
                if !t.method.has_classifier() {
                    let novelty: f64 = points.iter().filter_map(|p| p.novelty).sum();
                    out.push(obs(t.method, "grid", "mean_novelty", Some(novelty / n)));
                }
                surfaces.insert((seed, t.method), points);
            }
        }
    }
    Ok(out)
}

/// Runs the configured experiment for every seed, then writes all outputs
/// once from this thread.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunSummary, RunError> {
    let seeds = opts.seed_override.clone().unwrap_or_else(|| cfg.raw.seeds.clone());
    if seeds.is_empty() {
        return Err(RunError::Config("seed-override: at least one seed is required".into()));
    }
    let output_dir = opts.out.clone().unwrap_or_else(|| cfg.raw.output_dir.clone());
    let source = Source::load(cfg)?;
    if cfg.experiment == Experiment::Surfaces && source.n_features(cfg) != 2 {
        return Err(RunError::Data(format!(
            "surfaces need 2-D data, dataset `{}` has {} features",
            cfg.dataset,
            source.n_features(cfg)
        )));
    }

    let mut surfaces = Surfaces::new();
    let sweep = seed_sweep(&seeds, |seed, rng| {
        let result = run_seed(cfg, &source, seed, rng, &mut surfaces);
        if !opts.quiet && result.is_ok() {
            eprintln!("uq: {} seed {seed} done", cfg.experiment);
        }
        result
    })
    .map_err(eval_error)?;

    let records = output::records(cfg.experiment.kind(), &sweep);
    std::fs::create_dir_all(&output_dir)
        .map_err(|e| RunError::Data(format!("cannot create {}: {e}", output_dir.display())))?;
    output::write_csv(&output_dir.join(output::RESULTS_CSV), &records)?;
    output::write_json(&output_dir.join(output::RESULTS_JSON), cfg, &sweep, &records)?;
    let mut surface_files = Vec::new();
    for ((seed, method), points) in &surfaces {
        let path = output_dir.join(output::surface_file_name(*method, *seed));
        output::write_surface(&path, points)?;
        surface_files.push(path);
    }
    if !opts.quiet {
        eprintln!("uq: wrote {} records to {}", records.len(), output_dir.display());
    }
    Ok(RunSummary {
        output_dir,
        records,
        surface_files,
    })
}
