//! Config parsing, subcommand dispatch and report types behind the `qrlab`
//! binary.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{run, Outcome, SUBCOMMANDS};
pub use config::{Diagnostic, Experiment, Overrides};
pub use report::{ReportBody, RunReport, Table};
