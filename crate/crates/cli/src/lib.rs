//! Batch front end: one subcommand per run, files in and files out,
//! diagnostics on stderr.

pub mod commands;
pub mod config;

pub use commands::run;
pub use config::{parse_args, parse_args_with_env, Command, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] topicforge_core::Error),
    #[error("{0}")]
    Runtime(String),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    /// 0 for help/version output, 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Runtime(_) => 1,
        }
    }
}
