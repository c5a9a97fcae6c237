//! Library half of the `emdkit` command-line tool: input documents, result
//! rendering and the subcommand implementations.

pub mod commands;
pub mod document;
pub mod error;
pub mod render;
pub mod selftest;

pub use error::{CliError, CliResult};

/// Environment variable overriding the exact-path `d·n` threshold.
pub const THRESHOLD_ENV: &str = "EMDKIT_EXACT_THRESHOLD";

/// The exact-path threshold from [`THRESHOLD_ENV`], or the library default.
pub fn exact_threshold() -> CliResult<usize> {
    match std::env::var(THRESHOLD_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("{THRESHOLD_ENV}={v:?} is not a nonnegative integer"))),
        Err(_) => Ok(emdkit::expectation::DEFAULT_EXACT_THRESHOLD),
    }
}
