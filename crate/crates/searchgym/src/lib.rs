//! Command-line front end for the whole toolkit: build a searchable
//! environment from a problems corpus, serve it over the tool protocol,
//! evaluate agents against it, cluster traces into a reasoning graph, and
//! merge everything into report tables.
//!
//! Each subcommand lives in its own module and is an ordinary function
//! over plain argument structs, so integration tests drive the exact same
//! code path as the binary. Errors carry a stable class, and every class
//! maps to its own process exit code.

pub mod analyze;
pub mod build;
pub mod cli;
pub mod config;
pub mod eval;
pub mod manifest;
pub mod report;
pub mod serve;

pub use cli::{run, Cli, Command};
pub use config::FileConfig;
pub use manifest::{read_manifest, write_manifest, BuildManifest, MANIFEST_SCHEMA_VERSION};

use thiserror::Error;

/// One error class per exit code. `Usage` doubles as the class for bad
/// flag combinations so it shares clap's own exit code for parse errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid data: {0}")]
    Data(String),
    #[error("{stage} stage failed: {message}")]
    Stage { stage: String, message: String },
    #[error("serve: {0}")]
    Serve(String),
}

impl CliError {
    /// Process exit code for this error class (0 is success, 2 matches
    /// clap's argument-parse failures).
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Data(_) => 4,
            CliError::Stage { .. } => 5,
            CliError::Serve(_) => 6,
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn stage(stage: &str, err: impl std::fmt::Display) -> Self {
        CliError::Stage {
            stage: stage.to_string(),
            message: err.to_string(),
        }
    }
}
