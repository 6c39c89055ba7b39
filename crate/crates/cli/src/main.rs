//! `cren`: entanglement measures and monogamy audits from the command line.
//!
//! Parties are numbered from 1 on the command line. Exit status is 0 on
//! success (violations found by an audit are results, not failures), 2 for
//! bad input and 3 when a numerical invariant breaks.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cren_core::Error;

#[derive(Debug, Parser)]
#[command(
    name = "cren",
    version,
    about = "Entanglement measures and monogamy audits for qudit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summarize a state: profile, norm or trace, rank, Schmidt data.
    State {
        #[command(flatten)]
        source: Source,
        /// Cut to report Schmidt data or marginal spectrum for, e.g. `1` or `1|23`.
        #[arg(long)]
        cut: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate entanglement measures across a cut.
    Measure {
        #[command(flatten)]
        source: Source,
        /// Comma-separated: concurrence, negativity, cren, crenoa, coa.
        #[arg(long, default_value = "negativity")]
        measure: String,
        #[arg(long, default_value = "1")]
        cut: String,
        #[command(flatten)]
        opt: OptArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Audit monogamy inequalities of a pure state.
    Audit {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        focus: usize,
        /// Comma-separated: ckw, cren, negativity, coa, crenoa.
        #[arg(long, default_value = "ckw,cren,negativity,coa,crenoa")]
        measures: String,
        #[command(flatten)]
        opt: OptArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form negativity roofs of partially coherent W-class states over
    /// a (p, lambda) grid.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Comma-separated values in [0, 1].
        #[arg(long, default_value = "0.5")]
        p: String,
        /// Comma-separated values in [0, 1].
        #[arg(long, default_value = "0,1")]
        lambda: String,
        /// Blocks of parties, e.g. `1|23` or `1,2|3,4`.
        #[arg(long)]
        partition: Option<String>,
        /// Sampled decompositions per grid point for the cross-check.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Search seeded random pure states for negativity-roof monogamy
    /// violations (focus party 1).
    Hunt {
        /// Local dimensions, e.g. `3,2,2`.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[command(flatten)]
        opt: OptArgs,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
struct Source {
    /// State-spec document (YAML).
    #[arg(long, conflicts_with = "family")]
    spec: Option<PathBuf>,
    /// Built-in state: ou, kim_sanders, bell, ghz3, w3.
    #[arg(long)]
    family: Option<String>,
    /// Parties to trace out before anything else, e.g. `3` or `2,3`.
    #[arg(long)]
    trace_out: Option<String>,
}

#[derive(Debug, Args)]
struct OptArgs {
    /// Decomposition size (defaults to rank^2, capped at 16).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, default_value_t = 8)]
    starts: usize,
    #[arg(long, default_value_t = 200)]
    sweeps: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol_rel: f64,
    /// Saturation tolerance for audit verdicts.
    #[arg(long, default_value_t = 1e-7)]
    tol_sat: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Output {
    /// table, csv or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Write to a file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    if err.is_input_error() {
        2
    } else {
        3
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("CREN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Domain(format!(
            "CREN_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Domain(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("cren: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
