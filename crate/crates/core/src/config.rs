//! Pipeline hyperparameters.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::Connectivity;
use crate::sampling::{SamplerSpec, SamplerStrategy};
use crate::selection::{SelectionConfig, SelectionStrategy};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("theta2 ({theta2}) must be greater than theta1 ({theta1})")]
    ThetaOrder { theta1: f64, theta2: f64 },
    #[error("{name} must be in (0, 1], got {value}")]
    ThetaRange { name: &'static str, value: f64 },
    #[error("{name} must be in [0, 1], got {value}")]
    TauRange { name: &'static str, value: f64 },
    #[error("k must be at least 1")]
    ZeroPoints,
    #[error("resample_period_m must be at least 1")]
    ZeroPeriod,
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Constants passed through to an external trainer; not used here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainerHandoff {
    pub lambda1: f64,
    pub lambda2: f64,
    pub ema_alpha: f64,
}

impl Default for TrainerHandoff {
    fn default() -> Self {
        TrainerHandoff {
            lambda1: 1.0,
            lambda2: 0.01,
            ema_alpha: 0.999,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementConfig {
    /// Prompt points per instance.
    pub k: usize,
    pub tau1: f64,
    pub tau2: f64,
    /// Confidence needed for a pseudo-label to be used as supervision.
    pub theta1: f64,
    /// Confidence needed for a pseudo-label to extend a weak region.
    pub theta2: f64,
    pub resample_period_m: u32,
    pub connectivity: Connectivity,
    pub sampler: SamplerStrategy,
    pub selection: SelectionStrategy,
    pub seed: u64,
    pub trainer_handoff: TrainerHandoff,
}

impl Default for RefinementConfig {
    fn default() -> Self {
        RefinementConfig {
            k: 5,
            tau1: 0.3,
            tau2: 0.7,
            theta1: 0.96,
            theta2: 0.98,
            resample_period_m: 4,
            connectivity: Connectivity::Eight,
            sampler: SamplerStrategy::SkeletonGrid,
            selection: SelectionStrategy::WeakAware,
            seed: 0,
            trainer_handoff: TrainerHandoff::default(),
        }
    }
}

impl RefinementConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k == 0 {
            return Err(ConfigError::ZeroPoints);
        }
        if self.resample_period_m == 0 {
            return Err(ConfigError::ZeroPeriod);
        }
        for (name, value) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::TauRange { name, value });
            }
        }
        for (name, value) in [("theta1", self.theta1), ("theta2", self.theta2)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(ConfigError::ThetaRange { name, value });
            }
        }
        if self.theta2 <= self.theta1 {
            return Err(ConfigError::ThetaOrder {
                theta1: self.theta1,
                theta2: self.theta2,
            });
        }
        Ok(())
    }

    pub fn sampler_spec(&self, seed: u64) -> SamplerSpec {
        SamplerSpec {
            strategy: self.sampler,
            k: self.k,
            seed,
        }
    }

    pub fn selection_config(&self) -> SelectionConfig {
        SelectionConfig {
            tau1: self.tau1,
            tau2: self.tau2,
            strategy: self.selection,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
