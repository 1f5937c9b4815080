//! Problem files, report records and the `charp` subcommands.

pub mod commands;
pub mod problem;
pub mod report;

pub use commands::{CliError, CliResult, Options};
pub use problem::{Mode, ParseError, Problem};
pub use report::{Record, Report, Verdict};
