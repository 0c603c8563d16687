//! Command-line front end: input files, reports and the subcommands.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{run, run_command, Cli, Command, Outcome, Settings};
pub use input::{parse_input, InputError, Position};
pub use report::{Payload, Report};
