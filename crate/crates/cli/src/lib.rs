//! Command-line front end for `mvqn-core`: CSV datasets, canonical JSON
//! model files, and the `mvqn` subcommands.

pub mod commands;
pub mod dataset;
pub mod error;
pub mod model_file;
pub mod render;

pub use commands::{run, Cli};
pub use error::CliError;
