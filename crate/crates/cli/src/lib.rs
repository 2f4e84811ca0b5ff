//! Batch driver: curvature, descriptors, distance matrix and retrieval
//! evaluation, configured by a TOML [`RunConfig`] that flags can override.

pub mod commands;
pub mod config;

pub use commands::{CliError, CliResult, ManifestRow};
pub use config::RunConfig;
