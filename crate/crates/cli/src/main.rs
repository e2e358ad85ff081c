//! `bohmquant`: spectra, diagnostics and trajectories for stationary states
//! quantized through the quantum potential and the continuity condition.
//!
//! Exit status: 0 success, 1 usage or config error, 2 solver failure,
//! 3 diagnostic failure. Artifacts written before a failure are kept.

mod commands;
mod config;
mod output;
mod reproduce;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;
use crate::config::Config;
use crate::setup::Overrides;

#[derive(Parser)]
#[command(name = "bohmquant", version, about = "Bound-state quantization with the quantum potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// key = value config file with [section] headers.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Drop the quantum potential from the dynamics.
    #[arg(long, global = true)]
    classical: bool,
    /// Bisection tolerance for solves, continuity tolerance for verify.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for rest-check sample points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Bound states of a 1D potential.
    Solve1d,
    /// Separated states of a central potential.
    SolveCentral,
    /// Diagnostic battery on a stored state bundle.
    Verify {
        /// Bundle written by solve1d or solve-central.
        bundle: Option<PathBuf>,
    },
    /// Integrate the canonical equations from one starting point.
    Trajectory,
    /// Run every check against its closed form and summarize.
    Reproduce,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = cli.common;
    let cfg = match &c.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let ov = Overrides {
        hbar: c.hbar,
        mass: c.mass,
        tol: c.tol,
        seed: c.seed,
        classical: c.classical,
    };
    let needs_config = !matches!(cli.command, Command::Verify { .. } | Command::Reproduce);
    if needs_config && c.config.is_none() {
        return Err(Failure::Usage("this command needs --config".into()));
    }
    match cli.command {
        Command::Solve1d => commands::solve1d(&cfg, &ov, &c.out),
        Command::SolveCentral => commands::solve_central(&cfg, &ov, &c.out),
        Command::Verify { bundle } => commands::verify(&cfg, &ov, bundle, &c.out),
        Command::Trajectory => commands::trajectory(&cfg, &ov, &c.out),
        Command::Reproduce => reproduce::reproduce(&ov, &c.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
