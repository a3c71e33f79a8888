//! Configuration parsing and experiment running behind the `richardson`
//! command.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_with, ConfigError, ExperimentConfig, Kind};
pub use run::{run_experiment, RunError, RunOptions, RunReport};
