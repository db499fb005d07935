//! Optional TOML configuration. Command-line flags and the environment take
//! precedence over the file; the file takes precedence over built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

pub const DEFAULT_TRACE_BOUND: u64 = 100;
pub const DEFAULT_VERIFY_BOUND: u64 = 10_000;
pub const DEFAULT_THETA_B: u64 = 100;
pub const DEFAULT_AUX_HEIGHT: u64 = 10_000;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub trace_bound: Option<u64>,
    pub verify_bound: Option<u64>,
    pub theta_b: Option<u64>,
    pub aux_height: Option<u64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn trace_bound(&self, flag: Option<u64>) -> u64 {
        flag.or(self.trace_bound).unwrap_or(DEFAULT_TRACE_BOUND)
    }

    pub fn verify_bound(&self, flag: Option<u64>) -> u64 {
        flag.or(self.verify_bound).unwrap_or(DEFAULT_VERIFY_BOUND)
    }

    pub fn theta_b(&self, flag: Option<u64>) -> u64 {
        flag.or(self.theta_b).unwrap_or(DEFAULT_THETA_B)
    }

    pub fn aux_height(&self, flag: Option<u64>) -> u64 {
        flag.or(self.aux_height).unwrap_or(DEFAULT_AUX_HEIGHT)
    }
}
