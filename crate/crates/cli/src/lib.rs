//! Command-line front end for the `seqlepski` experiments: TOML scenario
//! files in, deterministic CSV reports out.

pub mod commands;
pub mod config;
pub mod report;

use thiserror::Error;

pub use commands::{run_risk, run_suite, trace_path, Outcome, Suite};
pub use config::{ConfigError, ExperimentConfig, Overrides, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: seqlepski::Error,
    },
}

impl CliError {
    /// 1 for I/O, 2 for unreadable config, 3 for invalid values.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(ConfigError::Parse { .. }) => 2,
            CliError::Config(ConfigError::Invalid { .. }) | CliError::Numeric { .. } => 3,
        }
    }
}

/// Exit code when `--strict` is set and a suite check fails.
pub const EXIT_CHECK_FAILED: i32 = 4;
