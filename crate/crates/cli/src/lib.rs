//! Command-line orchestration for spikescope: simulate Poisson layers,
//! analyze captured traces, run the training-condition sweep, monitor firing
//! rates during training and summarize finished sweeps.

pub mod cli;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;
pub mod tables;

pub use cli::run;
pub use error::CliError;
