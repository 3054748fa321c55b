//! `fracmap` — CLI front end for the fractional-order map engine.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O error, 3 completed
//! with an empty-result warning (every orbit diverged).

mod args;
mod commands;
mod outdir;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn config(msg: impl std::fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }

    fn io_at(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Successful-run verdict driving the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// The run produced only divergence markers.
    AllDiverged,
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap renders help to stdout and errors to stderr by itself.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match commands::run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::AllDiverged) => {
            eprintln!("warning: every computed orbit diverged; outputs contain only markers");
            ExitCode::from(3)
        }
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Io { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
