//! Experiment front end for the block-code key pre-distribution library:
//! a JSON config, one function per subcommand, CSV output.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{
    cmd_analyze, cmd_assign, cmd_discover, cmd_simulate, cmd_storage, cmd_sweep_r,
    cmd_sweep_storage, CommandOutput,
};
pub use config::{code_id, CodeConfig, ExperimentConfig, StorageVariant};
pub use error::CliError;
