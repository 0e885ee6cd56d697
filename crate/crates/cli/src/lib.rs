//! Command-line front end for `bicoef-core`.
//!
//! [`run`] parses arguments, executes one subcommand and writes its report.
//! Exit codes: 0 success, 1 usage or input error, 2 a computed result
//! violated a bound or an internal cross-check.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Seed used when neither `--seed` nor `BICOEF_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "BICOEF_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] bicoef_core::Error),
    /// The report was produced but shows a failed check.
    #[error("{0}")]
    Violation(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bicoef_core::Error as E;
        match self {
            CliError::Violation(_) => EXIT_VIOLATION,
            CliError::Core(
                E::TheoremViolation { .. } | E::BoundViolation(_) | E::InternalInconsistency(_),
            ) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}

/// `--seed`, else `$BICOEF_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Runs the program on `argv` (including the program name) and returns
/// the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => return report_error(&e, err),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let first = text.lines().next().unwrap_or("error: invalid arguments");
                let _ = writeln!(err, "{first}");
            }
            return code;
        }
    };

    let format = cli.format();
    let outcome = commands::execute(&cli.command);
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return report_error(&e, err),
    };
    let written = match (&outcome.table, format) {
        (Some(table), Format::Csv | Format::Plain) => output::emit_table(table, out),
        _ => output::emit(&output::envelope(cli.command.name(), outcome.report), format, out),
    };
    if let Err(e) = written {
        return report_error(&e, err);
    }
    match outcome.failure {
        Some(e) => report_error(&e, err),
        None => EXIT_OK,
    }
}

fn report_error(e: &CliError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;
    use bicoef_core::Error;

    #[test]
    fn violations_exit_two() {
        let theorem = Error::TheoremViolation {
            index: 3,
            detail: "|a2| > bound".into(),
        };
        assert_eq!(CliError::Core(theorem).exit_code(), EXIT_VIOLATION);
        assert_eq!(CliError::Core(Error::BoundViolation("x".into())).exit_code(), EXIT_VIOLATION);
        assert_eq!(CliError::Core(Error::InternalInconsistency("x".into())).exit_code(), EXIT_VIOLATION);
        assert_eq!(CliError::Violation("x".into()).exit_code(), EXIT_VIOLATION);
        assert_eq!(CliError::Core(Error::InvalidEta(-1.0)).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
    }

    #[test]
    fn explicit_seed_wins() {
        assert_eq!(resolve_seed(Some(9)).unwrap(), 9);
    }
}
