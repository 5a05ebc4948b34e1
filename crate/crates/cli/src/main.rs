//! `pgm`: splits, grid search, training, prediction, evaluation and report
//! comparison for PGM classifiers.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or
//! consistency error.

mod commands;
mod spec;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use pgm_core::PgmError;

/// Marks an error as a usage problem (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "pgm", version, about = "Pretty Good Measurement classifiers")]
struct Cli {
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, env = "PGM_WORKERS", global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: commands::Command,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<PgmError>() {
            return if e.root().is_usage() { 1 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.workers.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
