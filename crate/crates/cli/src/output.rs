//! `results.csv`, `results.json` and surface grid files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;
use uq_core::evaluation::{Method, SeedSweep, SurfacePoint};

use crate::config::ExperimentConfig;
use crate::RunError;

pub const RESULTS_CSV: &str = "results.csv";
pub const RESULTS_JSON: &str = "results.json";
pub const SURFACE_HEADER: [&str; 5] = ["x1", "x2", "probability", "entropy", "novelty"];
const ABSENT: &str = "absent";

/// One reported number: a row of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub method: Method,
    pub seed: u64,
    pub context: String,
    pub metric: String,
    pub value: Option<f64>,
}

pub fn records(experiment: &str, sweep: &SeedSweep) -> Vec<ResultRecord> {
    sweep
        .runs
        .iter()
        .flat_map(|run| {
            run.observations.iter().map(move |o| ResultRecord {
                experiment: experiment.to_string(),
                method: o.key.method,
                seed: run.seed,
                context: o.key.context.clone(),
                metric: o.key.metric.clone(),
                value: o.value,
            })
        })
        .collect()
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Data(format!("cannot write {}: {e}", path.display()))
}

fn format_value(v: Option<f64>) -> String {
    v.map_or_else(|| ABSENT.to_string(), |x| x.to_string())
}

pub fn write_csv(path: &Path, records: &[ResultRecord]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(["experiment", "method", "seed", "context", "metric", "value"])
        .map_err(|e| io_error(path, e))?;
    for r in records {
        w.write_record([
            r.experiment.as_str(),
            r.method.as_str(),
            &r.seed.to_string(),
            &r.context,
            &r.metric,
            &format_value(r.value),
        ])
        .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

pub fn write_json(
    path: &Path,
    config: &ExperimentConfig,
    sweep: &SeedSweep,
    records: &[ResultRecord],
) -> Result<(), RunError> {
    let seeds: Vec<_> = sweep
        .runs
        .iter()
        .map(|run| {
            let rows: Vec<_> = records
                .iter()
                .filter(|r| r.seed == run.seed)
                .map(|r| json!({"method": r.method, "context": r.context, "metric": r.metric, "value": r.value}))
                .collect();
            json!({"seed": run.seed, "records": rows})
        })
        .collect();
    let aggregates: Vec<_> = sweep
        .aggregates
        .iter()
        .map(|a| {
            json!({
                "method": a.key.method,
                "context": a.key.context,
                "metric": a.key.metric,
                "count": a.count,
                "mean": a.mean,
                "std": a.std,
            })
        })
        .collect();
    let doc = json!({
        "toolkit": "uq",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": config.experiment.kind(),
        "config": config.raw,
        "models": config.models,
        "seeds": seeds,
        "aggregates": aggregates,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| io_error(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

pub fn surface_file_name(method: Method, seed: u64) -> String {
    format!("surfaces_{method}_seed{seed}.csv")
}

/// Grid CSV with the fixed [`SURFACE_HEADER`]; `novelty` is empty for
/// methods other than the VAE.
pub fn write_surface(path: &Path, points: &[SurfacePoint]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    w.write_record(SURFACE_HEADER).map_err(|e| io_error(path, e))?;
    for p in points {
        w.write_record([
            p.x1.to_string(),
            p.x2.to_string(),
            p.probability.to_string(),
            p.entropy.to_string(),
            p.novelty.map_or_else(String::new, |v| v.to_string()),
        ])
        .map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_roundtrip_through_text() {
        for v in [0.1 + 0.2, 1e-300, 123456.789, 0.5, 1.0 / 3.0] {
            assert_eq!(format_value(Some(v)).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(None), "absent");
    }
}
