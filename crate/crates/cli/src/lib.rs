//! Batch runner for the `anderson-mp` estimators.
//!
//! A run is `(subcommand, config file, overrides)`; each subcommand writes one
//! or more CSV tables with fixed headers. Outputs depend only on the config and
//! seed, never on the worker count.

pub mod config;
pub mod runner;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, RawConfig};
pub use runner::{fmt_float, run, tables, Command, RunError, Table};

/// Environment variable capping the worker count; `0` or unset uses the default pool.
pub const THREADS_ENV: &str = "ANDERSON_MP_THREADS";
