//! Run configuration schema (TOML). One file drives a reproducible run;
//! seeds and output paths can be overridden by `TVPREG_SEED` and
//! `TVPREG_OUTPUT_DIR`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dgp::DatasetSpec;
use crate::mc::McConfig;

use super::portfolio::PortfolioSpec;

/// Top-level config file; each command reads its own section.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub estimate: Option<EstimateConfig>,
    pub simulate: Option<SimulateConfig>,
    pub mc: Option<McSection>,
    pub portfolios: Option<PortfolioSpec>,
}

/// Settings for `estimate` and `select-bandwidth`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    pub input: PathBuf,
    pub response: String,
    pub regressors: Vec<String>,
    /// Prepend a constant column.
    #[serde(default)]
    pub intercept: bool,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    /// Two-sided miscoverage level `q`; bands are at level `1 - q`.
    #[serde(default = "default_confidence_q")]
    pub confidence: f64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub bandwidth: BandwidthMode,
}

fn default_kernel() -> String {
    "epanechnikov".into()
}

fn default_confidence_q() -> f64 {
    0.05
}

fn default_draws() -> usize {
    200
}

fn default_tolerance() -> f64 {
    0.10
}

fn default_leave_out() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Exactly one bandwidth mode per run (enforced by the tagged layout).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BandwidthMode {
    Fixed {
        c: f64,
        gamma: f64,
    },
    Cv {
        grid: Vec<f64>,
        #[serde(default = "default_leave_out")]
        leave_out: usize,
        #[serde(default = "default_true")]
        select_scale: bool,
        c_grid: Option<Vec<f64>>,
    },
    Bootstrap {
        grid: Vec<f64>,
        #[serde(default = "default_draws")]
        draws: usize,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
        /// Miscoverage level of the inner bootstrap intervals; defaults
        /// to the run's `confidence` setting.
        selection_confidence: Option<f64>,
        #[serde(default = "default_true")]
        select_scale: bool,
        c_grid: Option<Vec<f64>>,
    },
}

/// Settings for `simulate`: draw one dataset and write it with its true
/// coefficient paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub dgp: DatasetSpec,
    pub sample_size: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Settings for `mc` when not using a named preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub experiment: McConfig,
    pub output_dir: PathBuf,
    /// Table layout name: `rates` (default), `pointwise`, or `custom`.
    #[serde(default)]
    pub layout: Option<String>,
}

/// Loads and parses a TOML config file.
pub fn load_config(path: &std::path::Path) -> Result<FileConfig, ConfigError> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&body).map_err(|e| ConfigError::new(format!("{}: {e}", path.display())))
}

/// Configuration error (bad schema, missing section, inconsistent
/// settings).
#[derive(Debug, thiserror::Error)]
#[error("config error: {reason}")]
pub struct ConfigError {
    pub reason: String,
}

impl ConfigError {
    pub fn new(reason: impl Into<String>) -> Self {
        Self { reason: reason.into() }
    }
}
