//! Command-line front end for the crossing-count library: argument
//! handling, parallel Monte-Carlo, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;

pub use commands::run;
pub use config::{Cli, RunConfig};
pub use error::CliError;
