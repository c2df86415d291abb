//! JSON run configuration. Every section is optional and falls back to its
//! defaults; unknown keys are rejected so typos surface as validation errors.

use std::fs;
use std::path::{Path, PathBuf};

use multilat::network::{calibrate_radius, NetworkConfig, REFERENCE_MEANS};
use multilat::ranging::SyntheticTrace;
use multilat::{ShadowingParams, SweepConfig};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub network: NetworkSection,
    /// Stem of a saved topology: `<stem>.csv` and `<stem>.json`. Takes
    /// precedence over `network` when present.
    pub topology: Option<PathBuf>,
    pub sweep: SweepConfig,
    pub localize: LocalizeSection,
    pub error_models: ErrorModelsSection,
    pub rssi: RssiSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub width: f64,
    pub height: f64,
    pub node_count: usize,
    /// Fixed communication radius. When absent the radius is calibrated so
    /// the mean connectivity over `calibration_seeds` networks hits
    /// `target_mean`.
    pub radius: Option<f64>,
    pub target_mean: f64,
    pub calibration_seeds: u64,
    pub seed: u64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            width: 1.0,
            height: 1.0,
            node_count: 100,
            radius: None,
            target_mean: REFERENCE_MEANS[0],
            calibration_seeds: 32,
            seed: 0,
        }
    }
}

impl NetworkSection {
    pub fn resolve(&self) -> Result<NetworkConfig, CliError> {
        let radius = match self.radius {
            Some(r) => r,
            None => {
                if self.calibration_seeds == 0 {
                    return Err(CliError::validation("calibration_seeds must be at least 1"));
                }
                calibrate_radius(
                    self.width,
                    self.height,
                    self.node_count,
                    self.target_mean,
                    0..self.calibration_seeds,
                )?
            }
        };
        let cfg = NetworkConfig {
            width: self.width,
            height: self.height,
            node_count: self.node_count,
            radius,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizeSection {
    pub node: usize,
    /// Grid index into the sweep's error values; the draws match the sweep
    /// row at the same index.
    pub e_index: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorModelsSection {
    pub e: f64,
    pub max_range: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ErrorModelsSection {
    fn default() -> Self {
        ErrorModelsSection { e: 0.2, max_range: 6.0, samples: 61, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RssiSection {
    pub shadowing: ShadowingParams,
    pub synthetic: SyntheticTrace,
    pub trace: Option<PathBuf>,
    pub seed: u64,
}

pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("config {}: {e}", path.display())))
}
