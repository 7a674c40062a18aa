//! `spiral-lp`: solve, crossover, analyze and bench on MPS files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spiral_lp::linalg::LsMethod;

#[derive(Debug, Parser)]
#[command(name = "spiral-lp", version, about = "PDHG, spiral analysis and crossover for linear programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an MPS instance with PDHG and write a JSON report.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Warm start `{x, y}` in the reformulated variable order.
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Write the iterate trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Convert an optimal solution into an optimal vertex.
    Crossover {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Optimal `{x, y}` in the reformulated variable order; solved first when absent.
        #[arg(long)]
        warm: Option<PathBuf>,
    },
    /// Record a stride-1 plain PDHG trajectory and export its phases.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Start point `{x, y}`; zero when absent.
        #[arg(long)]
        warm: Option<PathBuf>,
        /// Step size; defaults to the step scale over ‖A‖₂.
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Solve and cross over every `.mps` file in a directory.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ols {
    Auto,
    Direct,
    Iterative,
}

impl From<Ols> for LsMethod {
    fn from(o: Ols) -> Self {
        match o {
            Ols::Auto => LsMethod::Auto,
            Ols::Direct => LsMethod::Direct,
            Ols::Iterative => LsMethod::Iterative,
        }
    }
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Relative tolerance on the KKT residuals.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, env = "SPIRAL_LP_SEED", default_value_t = 0)]
    seed: u64,
    /// Seconds allowed for each solve and for crossover.
    #[arg(long, default_value_t = 300.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 10_000_000)]
    max_iter: usize,
    /// Safety factor s in η = s/‖A‖₂.
    #[arg(long, default_value_t = spiral_lp::pdhg::DEFAULT_SAFETY)]
    step_scale: f64,
    #[arg(long, value_enum, default_value_t = Ols::Auto)]
    ols: Ols,
    /// Least-squares problems smaller than this in either dimension are solved directly.
    #[arg(long, default_value_t = spiral_lp::linalg::DEFAULT_DIRECT_THRESHOLD)]
    direct_threshold: usize,
    /// Report destination; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
