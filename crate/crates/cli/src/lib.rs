//! Config-driven runner for resonance experiments: parses a problem description,
//! runs the sign checks, indices, criterion and orbit search, and writes a report,
//! trajectory CSVs and a gnuplot script.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod artifacts;
pub mod config;
pub mod experiments;
pub mod pipeline;
pub mod report;

use std::path::Path;

use config::{ConfigError, LoadedConfig};

/// Loads a config from a path, or a bundled experiment when no such file exists.
pub fn load_config(arg: &str) -> Result<LoadedConfig, ConfigError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(text) = experiments::bundled(arg) {
            return LoadedConfig::from_str(text, &format!("{arg}.toml"), None);
        }
    }
    LoadedConfig::from_path(path)
}
