//! Command-line front end: config parsing, CSV/SVG emission and the
//! experiment drivers tying the core modules together.

pub mod config;
pub mod csvio;
pub mod runner;
pub mod svg;

use thiserror::Error;

/// CLI failure classes, mapped onto exit codes 2 (config), 3 (numerics)
/// and 4 (I/O).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerics(rdode_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Core errors raised while building models/config are config errors; the
/// same error type raised mid-run is a numerical failure. These helpers make
/// the call sites explicit.
pub fn as_config(e: rdode_core::Error) -> CliError {
    CliError::Config(e.to_string())
}

pub fn as_numerics(e: rdode_core::Error) -> CliError {
    CliError::Numerics(e)
}

pub type CliResult<T> = Result<T, CliError>;
