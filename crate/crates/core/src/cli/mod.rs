//! Command-line front end.
//!
//! Exit codes: 0 for `PASS` / `CHANNEL-OK`, 2 when the run exposes an
//! eavesdropper or a corrupted message, 1 for usage and runtime errors.

mod config;
mod report;
mod run;

pub use config::{load_probe_spec, parse_config, parse_probe_spec, Command, RunConfig, SourceSpec};
pub use report::{emit_report, Report, Verdict, SCHEMA_VERSION};
pub use run::run_command;

use std::ffi::OsString;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{command} failed: {source}")]
    Run {
        command: &'static str,
        #[source]
        source: crate::Error,
    },
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Parses, runs and emits; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(c) => c,
        Err(CliError::Usage(e))
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let report = match run_command(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = emit_report(&report, config.out.as_deref()) {
        eprintln!("error: {e}");
        return 1;
    }
    report.verdict.exit_code()
}
