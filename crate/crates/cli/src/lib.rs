//! Command-line front end: configuration, reports, the parallel product
//! expansion and file formats on top of `fakemonster-core`.

pub mod commands;
pub mod config;
pub mod export;
pub mod parallel;
pub mod report;

pub use commands::{execute, run, verify, CliError, Output, EXIT_DISCREPANCY, EXIT_PASS, EXIT_USAGE};
pub use config::{Cli, Command, Flags, Format, RunConfig, Target};
pub use report::{Check, Discrepancy, Report};
