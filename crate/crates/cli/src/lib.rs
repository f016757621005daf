//! Command-line front end for `rspcert_core`.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use args::Cli;
pub use commands::run;
pub use error::{exit, CliError};
pub use report::ReportJson;
