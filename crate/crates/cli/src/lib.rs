//! Command-line orchestration for the hdsurvey experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

pub use commands::{finish, CommandOutput, InspectSummary};
pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult, FailureKind};
pub use manifest::RunManifest;
