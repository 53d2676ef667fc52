//! Configuration-driven experiments for `hermheat`.
//!
//! One TOML document describes one run; [`runner::run`] validates it,
//! computes, and writes CSV/JSON artifacts plus `manifest.json`.

pub mod artifacts;
pub mod config;
pub mod runner;
pub mod signal;

pub use config::{emit, parse_config, Command, ConfigError, ExperimentConfig};
pub use runner::{run, validate, ErrorKind, Manifest, RunError};
