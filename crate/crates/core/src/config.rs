use std::path::Path;

use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::baseline::{FactorMode, LayoutMode};
use crate::error::{Error, Result};
use crate::ingestion::DEFAULT_SPIKE_THRESHOLD;
use crate::timeseries::{parse_zone, DEFAULT_COMPLETENESS_THRESHOLD};

fn default_spike() -> f64 {
    DEFAULT_SPIKE_THRESHOLD
}

fn default_completeness() -> f64 {
    DEFAULT_COMPLETENESS_THRESHOLD
}

/// Per-household settings, read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdConfig {
    pub user_id: String,
    pub timezone: String,
    pub country: String,
    #[serde(default)]
    pub factor_mode: FactorMode,
    #[serde(default)]
    pub layout_mode: LayoutMode,
    #[serde(default = "default_spike")]
    pub spike_threshold: f64,
    #[serde(default = "default_completeness")]
    pub completeness_threshold: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl HouseholdConfig {
    pub fn new(user_id: &str, timezone: &str, country: &str) -> Self {
        HouseholdConfig {
            user_id: user_id.to_string(),
            timezone: timezone.to_string(),
            country: country.to_string(),
            factor_mode: FactorMode::default(),
            layout_mode: LayoutMode::default(),
            spike_threshold: DEFAULT_SPIKE_THRESHOLD,
            completeness_threshold: DEFAULT_COMPLETENESS_THRESHOLD,
            seed: None,
        }
    }

    pub fn validate(&self) -> Result<Tz> {
        let zone = parse_zone(&self.timezone)?;
        if !(self.completeness_threshold > 0.0 && self.completeness_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "completeness_threshold {} outside (0, 1]",
                self.completeness_threshold
            )));
        }
        if !(self.spike_threshold.is_finite() && self.spike_threshold > 0.0) {
            return Err(Error::Config(format!(
                "spike_threshold {} must be positive",
                self.spike_threshold
            )));
        }
        Ok(zone)
    }

    pub fn zone(&self) -> Result<Tz> {
        self.validate()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: HouseholdConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
