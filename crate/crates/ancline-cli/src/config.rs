//! Configuration file support and flag merging.
//!
//! Precedence: command-line flags > config file > built-in defaults.

use serde::Deserialize;
use std::path::Path;

use crate::error::{CliError, Result};

/// Optional values read from a TOML config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub figure: FigureSection,
    #[serde(default)]
    pub sim: SimSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(rename = "N")]
    pub pop_size: Option<usize>,
    pub s: Option<f64>,
    pub u: Option<f64>,
    pub nu1: Option<f64>,
    pub sigma: Option<f64>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub out: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    pub points: Option<usize>,
    pub s_max: Option<f64>,
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub events: Option<u64>,
    pub horizon: Option<f64>,
    pub burn_in: Option<f64>,
    pub replicates: Option<u32>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Merge helper: flag beats file beats default.
pub fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Like [`pick`] but with no default; errors with the flag name.
pub fn require<T: Copy>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| CliError::Config(format!("missing required parameter '{name}'")))
}
