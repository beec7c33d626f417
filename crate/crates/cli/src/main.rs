//! `stretchmetrics`: simulate, analyze and calibrate stretchable strain sensors.

mod commands;
mod config;
mod plot;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{AnalyzeKind, SimKind};
use config::{RunConfig, SimParams};

/// Command failure, mapped onto the exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or configuration: exit 2.
    Usage(String),
    /// Analysis or domain error: exit 1, or 2 for invalid parameters.
    Domain(stretchmetrics_core::Error),
}

impl From<stretchmetrics_core::Error> for Failure {
    fn from(e: stretchmetrics_core::Error) -> Self {
        Failure::Domain(e)
    }
}

#[derive(Parser)]
#[command(
    name = "stretchmetrics",
    version,
    about = "Stretchable strain sensor characterization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON file of analysis thresholds.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override one setting, e.g. `r2_floor=0.99` or `sensor.gf=30` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic logs with a ground-truth sidecar.
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
        /// JSON file of simulator parameters.
        #[arg(long)]
        params: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the metrics report from a resistance and a tensile log.
    Analyze {
        #[arg(value_enum)]
        kind: AnalyzeKind,
        #[arg(long)]
        resistance: PathBuf,
        #[arg(long)]
        tensile: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit the angle model from calibration points; optionally estimate and score.
    Calibrate {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        resistance: Option<PathBuf>,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate angles with a saved model; optionally score against truth.
    Estimate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        resistance: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn run_config(c: &Common) -> Result<RunConfig, Failure> {
    config::load(c.config.as_deref(), &c.set)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            kind,
            params,
            common,
        } => {
            if common.config.is_some() {
                return Err(Failure::Usage(
                    "simulate takes --params, not --config".into(),
                ));
            }
            let p: SimParams = config::load(params.as_deref(), &common.set)?;
            commands::simulate(kind, p, &common.out)
        }
        Command::Analyze {
            kind,
            resistance,
            tensile,
            common,
        } => {
            let cfg = run_config(&common)?;
            commands::analyze(kind, &resistance, &tensile, &cfg, &common.out)
        }
        Command::Calibrate {
            points,
            resistance,
            truth,
            common,
        } => {
            let cfg = run_config(&common)?;
            commands::calibrate(
                &points,
                resistance.as_deref(),
                truth.as_deref(),
                &cfg,
                &common.out,
            )
        }
        Command::Estimate {
            model,
            resistance,
            truth,
            common,
        } => {
            let cfg = run_config(&common)?;
            commands::estimate(&model, &resistance, truth.as_deref(), &cfg, &common.out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}: {e}", e.name());
            match e {
                stretchmetrics_core::Error::InvalidParams { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
