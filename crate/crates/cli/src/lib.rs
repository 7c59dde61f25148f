//! Command-line experiments on top of `bifurc-core`: configuration,
//! manifests, file formats and rasters.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use error::{exit, CliError};
