//! Configuration, file output and the command-line driver.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod field_file;
pub mod output;

pub use cli::cli_main;
pub use config::{load_config, RunConfig};
