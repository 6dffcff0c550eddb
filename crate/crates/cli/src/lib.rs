//! Command-line front end and experiment harness for `gromov-core`.

pub mod config;
pub mod dispatch;
pub mod error;
pub mod experiment;

pub use config::{ExperimentConfig, ExperimentKind};
pub use dispatch::cli_dispatch;
pub use error::{CliError, CliResult};
pub use experiment::{compute, run_experiment, ExperimentOutput, RunOutcome};
