//! `spam-purify`: scenario runner and table reproduction for the SPAM
//! purification library.
//!
//! Exit codes: 0 success, 1 invalid input, 2 computation flagged
//! (e.g. an undistillable start fidelity or a failed oracle check), 3 I/O.

mod commands;
mod config;
mod emit;
mod error;
mod tables;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{DepthRange, OutputFormat};

#[derive(Parser)]
#[command(
    name = "spam-purify",
    version,
    about = "Purification of noisy qubit preparation and measurement: closed forms, verification, and applications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Precedence: flags, then the config
/// file, then defaults; environment variables are never consulted.
#[derive(Args, Clone)]
pub struct Shared {
    /// Preparation fidelity f in [1/2, 1]
    #[arg(long)]
    f: Option<f64>,
    /// Measurement noise fraction q in [0, 1/2)
    #[arg(long)]
    q: Option<f64>,
    /// CNOT depolarizing fraction in [0, 1] (default 0)
    #[arg(long)]
    eps: Option<f64>,
    /// key=value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (or directory for `tables`); stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Multi-start seed for the verification solver
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Purified preparation fidelity f(n) and acceptance probability
    PurifyPrep {
        #[command(flatten)]
        shared: Shared,
        /// Ancilla count or inclusive range, e.g. 2 or 0..4
        #[arg(long)]
        n: Option<DepthRange>,
    },
    /// Purified measurement noise fraction q(m) and acceptance probability
    PurifyMeas {
        #[command(flatten)]
        shared: Shared,
        /// Ancilla count or inclusive range, e.g. 2 or 0..4
        #[arg(long)]
        m: Option<DepthRange>,
    },
    /// Noisy-gate convergence limits for the given parameters
    FixedPoint {
        #[command(flatten)]
        shared: Shared,
    },
    /// Whether one purification round strictly improves the fidelity
    Condition {
        #[command(flatten)]
        shared: Shared,
    },
    /// Recover (f, q, eps) from two-qubit outcome statistics
    Verify {
        #[command(flatten)]
        shared: Shared,
        /// JSON object {"p00":..,"p01":..,"p10":..,"p11":..}; counts are
        /// normalized first
        #[arg(long)]
        probs: Option<String>,
    },
    /// Iterated entanglement distillation with purified measurements
    Distill {
        #[command(flatten)]
        shared: Shared,
        /// Start Werner fidelity
        #[arg(long)]
        f0: Option<f64>,
        /// Measurement purification depth (ancillas per side)
        #[arg(long)]
        n: Option<usize>,
        /// Stop once the fidelity strictly exceeds this target
        #[arg(long)]
        target: Option<f64>,
    },
    /// Entanglement-swap fidelity with purified repeater measurements
    Swap {
        #[command(flatten)]
        shared: Shared,
        /// Ancilla count or inclusive range, e.g. 2 or 0..4
        #[arg(long)]
        m: Option<DepthRange>,
    },
    /// Write the four reference tables as CSV files
    Tables {
        #[command(flatten)]
        shared: Shared,
    },
    /// Run the closed-form-vs-oracle equivalence sweep
    OracleCheck {
        #[command(flatten)]
        shared: Shared,
        /// Maximum purification depth swept (default 5)
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<(), error::CliError> {
    match cli.command {
        Command::PurifyPrep { shared, n } => commands::purify_prep(&shared, n),
        Command::PurifyMeas { shared, m } => commands::purify_meas(&shared, m),
        Command::FixedPoint { shared } => commands::fixed_point(&shared),
        Command::Condition { shared } => commands::condition(&shared),
        Command::Verify { shared, probs } => commands::verify_cmd(&shared, probs),
        Command::Distill {
            shared,
            f0,
            n,
            target,
        } => commands::distill(&shared, f0, n, target),
        Command::Swap { shared, m } => commands::swap(&shared, m),
        Command::Tables { shared } => tables::tables(&shared),
        Command::OracleCheck { shared, depth } => commands::oracle_check(&shared, depth),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
