//! Batch runner behind the `uq` binary: reads an experiment config, runs it
//! for every seed and writes tidy result tables.

pub mod config;
pub mod output;
pub mod runner;

use thiserror::Error;

pub use config::{DataSource, Experiment, ExperimentConfig};
pub use output::{ResultRecord, RESULTS_CSV, RESULTS_JSON, SURFACE_HEADER};
pub use runner::{run, RunOptions, RunSummary};

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("training failed: {0}")]
    Training(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Data(_) => 2,
            RunError::Training(_) => 3,
        }
    }
}
