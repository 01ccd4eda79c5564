//! Command-line front end: `run`, `probe`, `compare` and `bench`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

pub use args::{parse_args, CliInvocation, Command};
pub use commands::execute;
pub use error::CliError;
