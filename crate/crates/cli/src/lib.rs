//! Command-line driver: contraction analyses, `m_min` tables, single parareal
//! runs and the Kepler/Burgers experiment sweeps, all written as CSV.

pub mod commands;
pub mod experiments;
pub mod manifest;
pub mod output;

use std::path::PathBuf;

pub use commands::{execute, Command, Overrides};
pub use manifest::Manifest;
pub use output::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("{context}: {source}")]
    Solver {
        context: String,
        source: parareal_cg::Error,
    },
}

impl CliError {
    pub(crate) fn solver(context: impl Into<String>) -> impl FnOnce(parareal_cg::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Solver { context, source }
    }
}
