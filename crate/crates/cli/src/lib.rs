//! Command-line front end for the rolling experiments.

pub mod commands;
pub mod config;

pub use commands::{run, Command, Failure};
pub use config::{Format, Roller, RunConfig};
