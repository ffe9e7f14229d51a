//! `omegalab`: batch certificates for chain transitivity, shadowing and
//! ω-limit realization. Stdout carries only the JSON payload.
//!
//! Exit codes: 0 yes, 1 no, 2 unknown, 3 malformed input or I/O,
//! 4 analysis refused, 5 size guard.

mod commands;
mod config;
mod error;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "omegalab", version, about = "Exact certificates for ω-limit sets of interval maps and shifts")]
struct Cli {
    /// RunConfig JSON supplying defaults for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON payload here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-sided ICT verdict for a set at resolution ε (intervals) or block length k (shifts).
    IctCheck {
        #[command(flatten)]
        run: RunConfig,
        /// Also write the deciding graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// h-shadow a pseudo-orbit file, or certify that no h-shadow exists.
    Shadow {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Build a point whose ω-limit set is the given set, or report why none exists.
    Realize {
        #[command(flatten)]
        run: RunConfig,
    },
    /// Self-checking counterexample bundles.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Randomized agreement checks against brute-force oracles.
    Oracle {
        #[command(subcommand)]
        check: OracleCheck,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    RunAll,
    Run { id: String },
}

#[derive(Subcommand)]
enum OracleCheck {
    WiIct {
        #[command(flatten)]
        run: RunConfig,
    },
}

fn merged(run: RunConfig, cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(path) => Ok(run.over(RunConfig::load(path)?)),
        None => Ok(run),
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::IctCheck { run, dot } => commands::ict_check(&merged(run.clone(), cli)?, dot.as_deref()),
        Command::Shadow { run } => commands::shadow(&merged(run.clone(), cli)?),
        Command::Realize { run } => commands::realize(&merged(run.clone(), cli)?),
        Command::Examples { action: ExamplesAction::RunAll } => Ok(commands::examples_run_all()),
        Command::Examples { action: ExamplesAction::Run { id } } => commands::examples_run(id),
        Command::Oracle { check: OracleCheck::WiIct { run } } => commands::oracle_wi_ict(&merged(run.clone(), cli)?),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&outcome.payload).map_err(|e| CliError::Io(e.to_string()))?;
    match &cli.out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let result = dispatch(&cli).and_then(|outcome| emit(&cli, &outcome).map(|_| outcome.code));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("omegalab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
