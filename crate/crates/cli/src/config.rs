//! Run configuration: TOML file sections overlaid by command-line flags,
//! resolved with defaults, and echoed into a manifest.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Only IEEE double precision is implemented.
pub const PRECISION_BITS: u32 = 53;

/// Reads a config file; an absent path gives an empty table.
pub fn load_file(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

/// Overlays the set flags on the file section `[section]` and applies defaults.
pub fn resolve<F: Serialize, R: DeserializeOwned>(file: &toml::Table, section: &str, flags: &F) -> Result<R, CliError> {
    let mut table = match file.get(section) {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => return Err(CliError::Usage(format!("config section [{section}] must be a table"))),
        None => toml::Table::new(),
    };
    let set = toml::Table::try_from(flags).map_err(|e| CliError::Usage(e.to_string()))?;
    for (k, v) in set {
        table.insert(k, v);
    }
    toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Usage(format!("{section}: {}", e.message())))
}

/// Settings shared by all commands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct GlobalConfig {
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
}

fn default_precision() -> u32 {
    PRECISION_BITS
}

/// Global keys from the top level of the file, overridden by flags.
pub fn resolve_global(file: &toml::Table, threads: Option<usize>, precision_bits: Option<u32>) -> Result<GlobalConfig, CliError> {
    let mut g = GlobalConfig { threads: None, precision_bits: PRECISION_BITS };
    if let Some(v) = file.get("threads") {
        g.threads =
            Some(v.as_integer().filter(|&t| t > 0).ok_or_else(|| CliError::Usage("threads must be a positive integer".into()))? as usize);
    }
    if let Some(v) = file.get("precision-bits") {
        g.precision_bits = v.as_integer().ok_or_else(|| CliError::Usage("precision-bits must be an integer".into()))? as u32;
    }
    if threads.is_some() {
        g.threads = threads;
    }
    if let Some(p) = precision_bits {
        g.precision_bits = p;
    }
    if g.precision_bits != PRECISION_BITS {
        return Err(CliError::Usage(format!("precision-bits {} unsupported; only {PRECISION_BITS} is available", g.precision_bits)));
    }
    if g.threads == Some(0) {
        return Err(CliError::Usage("threads must be positive".into()));
    }
    Ok(g)
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Manifest<'a, T: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub precision_bits: u32,
    pub threads: usize,
    pub config: &'a T,
}

impl<T: Serialize> Manifest<'_, T> {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Usage(format!("manifest: {e}")))
    }
}

/// Where a manifest goes: an explicit path, the output directory, or stderr.
pub fn manifest_target(explicit: Option<&Path>, out_dir: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| out_dir.map(|d| d.join("manifest.toml")))
}
