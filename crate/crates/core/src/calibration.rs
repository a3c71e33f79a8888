//! Pilot-calibrated constants, read from the versioned defaults file
//! shipped with the crate.

use serde::Deserialize;

use crate::error::{config_err, Result};

const DEFAULTS: &str = include_str!("../calibration/defaults.toml");

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub version: u32,
    pub mu_pilot: MuPilot,
    pub truncation: Truncation,
    pub thresholds: Thresholds,
}

/// Pilot estimates of the unit-rate time constant per dimension.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuPilot {
    pub d2: f64,
    pub d3: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub k_guard: usize,
    pub horizon_factor: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub plateau_floor: f64,
    pub record_slack: f64,
    pub record_rate_floor: f64,
    pub shape_deficiency: f64,
    pub shape_deviation: f64,
    pub hampered_rel_tol: f64,
}

impl Calibration {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err!("calibration file: {e}"))
    }

    /// The defaults compiled into the crate.
    pub fn defaults() -> Self {
        Self::parse(DEFAULTS).expect("bundled calibration file is valid")
    }

    /// Pilot time constant for dimension `dim`, if one was calibrated.
    pub fn mu_pilot(&self, dim: usize) -> Result<f64> {
        match dim {
            2 => Ok(self.mu_pilot.d2),
            3 => Ok(self.mu_pilot.d3),
            _ => Err(config_err!("no pilot time constant for d={dim}; pass one explicitly")),
        }
    }
}
