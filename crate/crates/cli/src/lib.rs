//! Command-line front end for the `ncc-core` simulator: argument parsing,
//! figure presets, CSV/JSON output and the run summary.

pub mod output;
pub mod preset;
pub mod report;
pub mod run;
pub mod spec;

pub use run::{main_with, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, THREADS_ENV};
pub use spec::{parse_args, Command, ExperimentSpec, OutputFormat, UsageError};
