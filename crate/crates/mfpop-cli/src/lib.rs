//! Library surface of the `mfpop` binary: the JSON schemas and the
//! command implementations, exposed so integration tests can drive the
//! exact code paths the executable runs.

pub mod commands;
pub mod schema;

pub use commands::{run, Cli, CliError, Command};
pub use schema::{ProblemFile, ReportFile, PROBLEM_SCHEMA, REPORT_SCHEMA};
