//! Run configuration, read from strict JSON (unknown keys are rejected).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::DistanceTermConfig;
use crate::selector::{BudgetSchedule, CostModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Entropy,
    Diversity,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Entropy => "entropy",
            Strategy::Diversity => "diversity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialMode {
    /// Shortest path on the KNN graph of locations.
    Manifold,
    /// Straight-line distance between locations.
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    Cold,
    Warm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Free-form name used by `compare` output rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub strategy: Strategy,
    pub distance: DistanceTermConfig,
    pub spatial_mode: SpatialMode,
    pub k: usize,
    pub large_constant: f64,
    pub use_elevation: bool,
    pub cost: CostModel,
    pub checkpoints: Vec<f64>,
    pub seed: u64,
    pub init_mode: InitMode,
    pub pool_factor: f64,
    /// Number of random pairs used to estimate per-term normalization scales.
    pub scale_pairs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            label: None,
            strategy: Strategy::Diversity,
            distance: DistanceTermConfig::default(),
            spatial_mode: SpatialMode::Manifold,
            k: 8,
            large_constant: 1e9,
            use_elevation: false,
            cost: CostModel::default(),
            checkpoints: vec![600.0, 1200.0, 2400.0, 4800.0],
            seed: 0,
            init_mode: InitMode::Cold,
            pool_factor: 10.0,
            scale_pairs: 10_000,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::config(json_field(&e), e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn schedule(&self) -> Result<BudgetSchedule> {
        BudgetSchedule::new(self.checkpoints.clone())
    }

    pub fn validate(&self) -> Result<()> {
        self.distance.validate()?;
        self.cost.validate()?;
        self.schedule()?;
        if self.k == 0 {
            return Err(Error::config("k", "must be at least 1"));
        }
        if !(self.large_constant.is_finite() && self.large_constant > 0.0) {
            return Err(Error::config("large_constant", "must be positive and finite"));
        }
        if !(self.pool_factor.is_finite() && self.pool_factor > 0.0) {
            return Err(Error::config("pool_factor", "must be positive"));
        }
        if self.scale_pairs == 0 {
            return Err(Error::config("scale_pairs", "must be at least 1"));
        }
        Ok(())
    }
}

// serde_json messages look like "unknown field `foo`, expected ...".
fn json_field(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    msg.split('`').nth(1).map(str::to_string).unwrap_or_else(|| "config".to_string())
}
