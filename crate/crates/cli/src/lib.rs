//! Command implementations for the `erasim` binary.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use error::{CliError, CliResult};
