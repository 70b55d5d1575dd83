//! Command-line front end for `peakctl-core`: synthesis, closed-loop
//! simulation, condition checks, the randomized oracle and parameter sweeps,
//! with JSON and CSV artifacts.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] peakctl_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use peakctl_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(
                E::UnknownModel(_)
                | E::MissingParam { .. }
                | E::UnknownParam { .. }
                | E::InvalidParam { .. }
                | E::InvalidArgument(_)
                | E::Domain { .. }
                | E::InvalidControl { .. },
            ) => EXIT_USAGE,
            CliError::Core(_) | CliError::Output(_) => EXIT_NUMERICAL,
        }
    }
}
