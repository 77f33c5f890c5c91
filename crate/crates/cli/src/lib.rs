//! Command-line front end: experiment configs, report assembly and report comparison.

pub mod compare;
pub mod config;
pub mod error;
pub mod experiments;
pub mod function;
pub mod report;

pub use compare::{compare_reports, Diff, DiffEntry};
pub use config::{Experiment, ExperimentConfig};
pub use error::{CliError, CliResult, EXIT_FAIL};
pub use experiments::run;
pub use report::{Provenance, Record, Report, Status};
