//! Library half of the `uncount` command: spec parsing, run configuration,
//! report rendering and the property batteries.

pub mod check;
pub mod config;
pub mod corpus;
pub mod kt_selftest;
pub mod report;
pub mod spec_format;

use std::path::PathBuf;

use escape_core::EscapeError;
use thiserror::Error;

pub use config::{Mode, ModeName, OutputFormat, RunConfig, BUDGET_ENV};
pub use report::{run, Report};
pub use spec_format::{parse_spec, serialize_spec, SpecError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Spec { path: PathBuf, source: SpecError },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Escape(#[from] EscapeError),
}

impl CliError {
    /// 2 for unusable input, 1 for failures while computing.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Spec { .. } | CliError::Config(_) => 2,
            CliError::Escape(_) => 1,
        }
    }
}

pub fn load_spec(path: &std::path::Path) -> Result<escape_core::EnumerationSpec, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_spec(&bytes).map_err(|source| CliError::Spec {
        path: path.to_owned(),
        source,
    })
}
