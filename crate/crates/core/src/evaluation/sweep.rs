use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{EvalError, Method};
use crate::numeric::SeededRng;

/// Identifies one reported number within a seed's results.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MetricKey {
    pub method: Method,
    /// Fraction, group tag or corruption factor, e.g. `fraction=0.55`.
    pub context: String,
    pub metric: String,
}

impl MetricKey {
    pub fn new(method: Method, context: impl Into<String>, metric: impl Into<String>) -> Self {
        Self {
            method,
            context: context.into(),
            metric: metric.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub key: MetricKey,
    /// `None` marks an undefined metric.
    pub value: Option<f64>,
}

impl Observation {
    pub fn new(key: MetricKey, value: Option<f64>) -> Self {
        Self { key, value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub observations: Vec<Observation>,
}

/// Mean and sample standard deviation of one key over the seeds where it was
/// defined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub key: MetricKey,
    pub count: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedSweep {
    pub runs: Vec<SeedRun>,
    pub aggregates: Vec<Aggregate>,
}

impl SeedSweep {
    pub fn aggregate(&self, key: &MetricKey) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| &a.key == key)
    }
}

/// Mean and sample standard deviation (`n − 1` denominator). The mean is
/// absent for no values, the deviation for fewer than two.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (Some(mean), Some(var.sqrt()))
}

/// Runs `experiment` once per seed with `SeededRng::new(seed)` as the root
/// stream and aggregates every key. Keys are reported in order of first
/// appearance.
pub fn seed_sweep<F>(seeds: &[u64], mut experiment: F) -> Result<SeedSweep, EvalError>
where
    F: FnMut(u64, &SeededRng) -> Result<Vec<Observation>, EvalError>,
{
    if seeds.is_empty() {
        return Err(EvalError::InvalidConfig("at least one seed is required".into()));
    }
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let observations = experiment(seed, &SeededRng::new(seed)).map_err(|e| EvalError::Seed {
            seed,
            source: Box::new(e),
        })?;
        runs.push(SeedRun { seed, observations });
    }

    let mut order: Vec<MetricKey> = Vec::new();
    let mut values: HashMap<MetricKey, Vec<f64>> = HashMap::new();
    for run in &runs {
        for obs in &run.observations {
            let slot = values.entry(obs.key.clone()).or_insert_with(|| {
                order.push(obs.key.clone());
                Vec::new()
            });
            if let Some(v) = obs.value {
                slot.push(v);
            }
        }
    }
    let aggregates = order
        .into_iter()
        .map(|key| {
            let v = &values[&key];
            let (mean, std) = mean_std(v);
            Aggregate {
                count: v.len(),
                key,
                mean,
                std,
            }
        })
        .collect();
    Ok(SeedSweep { runs, aggregates })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(metric: &str) -> MetricKey {
        MetricKey::new(Method::SingleNn, "fraction=1.00", metric)
    }

    #[test]
    fn identical_results_have_zero_spread() {
        let sweep = seed_sweep(&[0, 1, 2, 3, 4], |_, _| Ok(vec![Observation::new(key("auc"), Some(0.7))])).unwrap();
        assert_eq!(sweep.runs.len(), 5);
        let agg = sweep.aggregate(&key("auc")).unwrap();
        assert_eq!(agg.count, 5);
        assert!((agg.mean.unwrap() - 0.7).abs() < 1e-15);
        assert!(agg.std.unwrap() < 1e-15);
    }

    #[test]
    fn single_seed_has_no_spread() {
        let sweep = seed_sweep(&[0], |_, rng| Ok(vec![Observation::new(key("u"), Some(rng.clone().uniform()))])).unwrap();
        let agg = &sweep.aggregates[0];
        assert_eq!(agg.mean, sweep.runs[0].observations[0].value);
        assert_eq!(agg.std, None);
    }

    #[test]
    fn absent_values_are_skipped() {
        let sweep = seed_sweep(&[0, 1, 2], |seed, _| {
            let v = (seed != 1).then_some(seed as f64);
            Ok(vec![Observation::new(key("auc"), v)])
        })
        .unwrap();
        let agg = &sweep.aggregates[0];
        assert_eq!(agg.count, 2);
        assert_eq!(agg.mean, Some(1.0));
        assert!((agg.std.unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn errors_name_the_seed() {
        let err = seed_sweep(&[3, 7], |seed, _| {
            if seed == 7 {
                Err(EvalError::Empty)
            } else {
                Ok(vec![])
            }
        })
        .unwrap_err();
        assert!(matches!(err, EvalError::Seed { seed: 7, .. }));
        assert!(err.to_string().starts_with("seed 7"));
        assert!(seed_sweep(&[], |_, _| Ok(vec![])).is_err());
    }

    #[test]
    fn root_stream_depends_on_seed() {
        let sweep = seed_sweep(&[0, 1], |_, rng| Ok(vec![Observation::new(key("u"), Some(rng.clone().uniform()))])).unwrap();
        assert_ne!(sweep.runs[0].observations[0].value, sweep.runs[1].observations[0].value);
    }
}
