//! `repmatch`: analyze markets, check and build matching processes, and
//! run the large-market simulations.
//!
//! Exit codes: 0 success, 1 a negative result (a FAIL verdict, a failed
//! construction certificate, a violated simulation invariant), 2 bad input.

mod analyze;
mod build;
mod check;
mod common;
mod manifest;
mod simulate;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use common::{Negative, Outcome};

#[derive(Parser)]
#[command(name = "repmatch", version, about = "Repeated matching markets: stability, self-enforcing processes, simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stable set, deferred acceptance, top coalition sequence and minmax values.
    Analyze(analyze::Args),
    /// Self-enforcement verdict for an automaton, optionally with the threshold discount.
    Check(check::Args),
    /// Build a trigger, folk or capacity-reducing process.
    Build {
        #[command(subcommand)]
        kind: build::Kind,
    },
    /// Monte Carlo experiments on tiered random markets.
    Simulate(simulate::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = match cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Check(a) => check::run(a),
        Command::Build { kind } => build::run(kind),
        Command::Simulate(a) => simulate::run(a),
    };
    eprintln!("wall time {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<Negative>().is_some() => {
            eprintln!("{e:#}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
