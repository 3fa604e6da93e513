//! Command-line front end: config parsing, file output, subcommands.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{
    cmd_analytic, cmd_simulate, cmd_sweep, cmd_verify, CliError, EXIT_CHECK_FAILED,
    EXIT_INFEASIBLE, EXIT_IO, EXIT_OK,
};
pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig};
