//! Command-line front end: config loading, reports and the reference tables.

pub mod config;
pub mod report;
pub mod tables;

use std::io::Write;
use std::path::{Path, PathBuf};

use cmqea_core::oracle::OracleError;
use cmqea_core::ProtocolError;
use thiserror::Error;

pub use config::{load_config, parse_config, ConfigError, Format, Mode, RunConfig};
pub use report::{build_report, Report};
pub use tables::render_tables;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            // an unreadable config file is still a config problem
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Protocol(_) | CliError::Oracle(_) => EXIT_FAILURE,
        }
    }
}

/// Loads the config, runs it, writes the report and prints a summary to `out`.
/// Returns the path written.
pub fn cmd_run(config_path: &Path, output: Option<&Path>, out: &mut dyn Write) -> Result<PathBuf, CliError> {
    let mut config = load_config(config_path)?;
    if let Some(path) = output {
        config.output_path = Some(path.to_path_buf());
    }
    let report = build_report(&config)?;
    let path = config.resolved_output();
    let io_err = |source| CliError::Io {
        path: path.clone(),
        source,
    };
    std::fs::write(&path, report.render(config.format)).map_err(io_err)?;
    let summary = format!("{}report written to {}\n", report.summary(), path.display());
    out.write_all(summary.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(path)
}
