//! `mmm`: simulate monotone Markov models and stress-test their stability.
//!
//! Exit codes: 0 success, 2 bad arguments or configuration, 3 simulation or
//! I/O failure, 4 not enough data for a tail estimate, 5 a stability check
//! failed. Every command takes an explicit `--seed`; the same invocation
//! with the same seed writes byte-identical output.

mod commands;
mod config;
mod csvio;
mod model;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::figure::FigureOpts;
use crate::commands::simulate::SimulateOpts;
use crate::commands::tail::TailOpts;
use crate::commands::{check, converge, figure, simulate, tail};
use crate::config::ConfigFile;
use crate::model::Model;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or model configuration (exit 2).
    Config(String),
    /// Simulation or I/O failure (exit 3).
    Run(String),
    /// Too little data to estimate a tail (exit 4).
    Tail(String),
    /// A stability check failed (exit 5).
    CheckFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Run(_) => 3,
            CliError::Tail(_) => 4,
            CliError::CheckFailed(_) => 5,
        }
    }

    pub fn config(msg: impl fmt::Display) -> CliError {
        CliError::Config(msg.to_string())
    }

    pub fn run(msg: impl fmt::Display) -> CliError {
        CliError::Run(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg)
            | CliError::Run(msg)
            | CliError::Tail(msg)
            | CliError::CheckFailed(msg) => f.write_str(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Run(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "mmm", version, about = "monotone Markov model toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelSel {
    /// Preset name: wage, belief, income-jump, income-drift, ou, flip.
    #[arg(long)]
    model: Option<String>,
    /// TOML file with a single model section overriding preset parameters.
    #[arg(long, conflicts_with = "model")]
    config: Option<PathBuf>,
}

impl ModelSel {
    fn resolve(&self) -> Result<Model, CliError> {
        match (&self.model, &self.config) {
            (Some(name), None) => Model::from_name(name).map_err(CliError::Config),
            (None, Some(path)) => ConfigFile::load(path)
                .and_then(|f| f.build())
                .map_err(CliError::Config),
            (None, None) => Err(CliError::Config("pass --model or --config".into())),
            (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write a dense grid plus the jump skeleton.
    Simulate {
        #[command(flatten)]
        sel: ModelSel,
        #[arg(long)]
        seed: u64,
        /// Time horizon (continuous-time models).
        #[arg(long)]
        horizon: Option<f64>,
        /// Step count (discrete-time models).
        #[arg(long)]
        steps: Option<usize>,
        /// Grid CSV path; the skeleton lands next to it with a -jumps suffix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the distance to stationarity along a checkpoint schedule.
    Converge {
        #[command(flatten)]
        sel: ModelSel,
        #[arg(long)]
        seed: u64,
        /// Starting point: a number, or "stationary" for a warm start.
        #[arg(long)]
        from: Option<String>,
        /// Comma-separated checkpoint times; defaults depend on the model.
        #[arg(long)]
        checkpoints: Option<String>,
        /// Replications per checkpoint.
        #[arg(long = "n-paths", default_value_t = 2_000)]
        n_paths: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the stationary income tail exponent.
    Tail {
        #[command(flatten)]
        sel: ModelSel,
        #[arg(long)]
        seed: u64,
        /// Events to simulate before estimating.
        #[arg(long = "n-events", default_value_t = 100_000)]
        n_events: usize,
    },
    /// Run the stability checks; any failure exits with code 5.
    Check {
        #[command(flatten)]
        sel: ModelSel,
        #[arg(long)]
        seed: u64,
    },
    /// Write the path and stationary-histogram CSVs behind one figure.
    Figure {
        /// Figure id: wage, belief, income-jump, income-drift.
        #[arg(long)]
        id: String,
        #[arg(long)]
        seed: u64,
        #[arg(long = "out-dir", default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Honor the MMM_THREADS cap before any parallel work starts.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MMM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "MMM_THREADS must be a positive integer, got '{raw}'"
        ))
    })?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(CliError::run)?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn real_main() -> Result<(), CliError> {
    init_threads()?;
    match Cli::parse().command {
        Command::Simulate {
            sel,
            seed,
            horizon,
            steps,
            out,
        } => {
            let model = sel.resolve()?;
            simulate::run(
                &model,
                &SimulateOpts {
                    seed,
                    horizon,
                    steps,
                    out,
                },
            )
        }
        Command::Converge {
            sel,
            seed,
            from,
            checkpoints,
            n_paths,
            out,
        } => {
            let model = sel.resolve()?;
            converge::run(
                &model,
                &converge::ConvergeOpts {
                    seed,
                    from,
                    checkpoints,
                    n_paths,
                    out,
                },
            )
        }
        Command::Tail {
            sel,
            seed,
            n_events,
        } => {
            let model = sel.resolve()?;
            tail::run(&model, &TailOpts { seed, n_events })
        }
        Command::Check { sel, seed } => {
            let model = sel.resolve()?;
            check::run(&model, seed)
        }
        Command::Figure { id, seed, out_dir } => figure::run(&FigureOpts { id, seed, out_dir }),
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
