//! Library half of the `ndlt` command-line tool: the container format and
//! the subcommand implementations, separated from argument parsing so they
//! can be driven from tests.

pub mod commands;
pub mod container;
pub mod error;

pub use container::{read_container, write_container, Value};
pub use error::{CliError, Result};
