//! Command-line front end and verification harness for `realpos`.

pub mod error;
pub mod input;
pub mod suites;

pub use error::{CliError, CliResult, EXIT_FAILED, EXIT_INVALID, EXIT_OK};
pub use suites::{find_suite, run_suite, RunConfig, SuiteReport, SUITES};
