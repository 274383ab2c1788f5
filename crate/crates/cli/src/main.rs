use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uq_cli::{run, Experiment, ExperimentConfig, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "uq", version, about = "Uncertainty-estimation experiments for tabular classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated seeds replacing the configured list.
    #[arg(long, value_delimiter = ',')]
    seed_override: Option<Vec<u64>>,
    /// Output directory replacing the configured one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured experiment and write results.csv and results.json.
    Run(Common),
    /// Train on 2-D data and export probability/entropy grids.
    SurfacesExport(Common),
}

fn execute(cli: Cli) -> Result<(), RunError> {
    let (args, surfaces) = match cli.command {
        Command::Run(a) => (a, false),
        Command::SurfacesExport(a) => (a, true),
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if surfaces {
        cfg.experiment = Experiment::Surfaces;
        cfg.raw.experiment = Experiment::Surfaces.to_string();
    }
    let opts = RunOptions {
        seed_override: args.seed_override,
        out: args.out,
        quiet: args.quiet,
    };
    run(&cfg, &opts).map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
