//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "rule": "LA-DF",
//!   "arrival": {"type": "bernoulli", "alpha": 0.3},
//!   "service": {"type": "geometric", "beta": 0.5},
//!   "slots": 1000000,
//!   "seed": 42
//! }
//! ```
//!
//! Optional keys: `warmup` (10000), `replications` (1),
//! `max_tracked_state` (1000), `thresholds`, and for `sweep` a `grid` of
//! `alpha`, `beta` and/or `rule` values.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_spec, ArrivalSpec, ModelSpec, SchedulingRule, ServiceSpec, SpecErrors, ValidatedSpec,
};
use crate::verify::{DEFAULT_TV_THRESHOLD, IDENTITY_THRESHOLD};

pub const DEFAULT_WARMUP: u64 = 10_000;
pub const DEFAULT_MAX_TRACKED_STATE: usize = 1000;

fn default_warmup() -> u64 {
    DEFAULT_WARMUP
}

fn default_replications() -> u32 {
    1
}

fn default_max_tracked_state() -> usize {
    DEFAULT_MAX_TRACKED_STATE
}

fn default_tv() -> f64 {
    DEFAULT_TV_THRESHOLD
}

fn default_identity() -> f64 {
    IDENTITY_THRESHOLD
}

/// Pass/fail thresholds per check family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_identity")]
    pub identity: f64,
    #[serde(default = "default_tv")]
    pub basta: f64,
    #[serde(default = "default_tv")]
    pub epoch: f64,
    #[serde(default = "default_tv")]
    pub ladf: f64,
    #[serde(default = "default_tv")]
    pub analytic: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            identity: IDENTITY_THRESHOLD,
            basta: DEFAULT_TV_THRESHOLD,
            epoch: DEFAULT_TV_THRESHOLD,
            ladf: DEFAULT_TV_THRESHOLD,
            analytic: DEFAULT_TV_THRESHOLD,
        }
    }
}

/// Parameter grid for `sweep`. `alpha` replaces a Bernoulli arrival
/// probability, `beta` a geometric service probability.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<Vec<SchedulingRule>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rule: SchedulingRule,
    pub arrival: ArrivalSpec,
    pub service: ServiceSpec,
    pub slots: u64,
    #[serde(default = "default_warmup")]
    pub warmup: u64,
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: u32,
    #[serde(default = "default_max_tracked_state")]
    pub max_tracked_state: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid spec: {0}")]
    Invalid(#[from] SpecErrors),
    #[error("grid: {0}")]
    Grid(String),
}

impl ExperimentConfig {
    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec {
            rule: self.rule,
            arrival: self.arrival.clone(),
            service: self.service.clone(),
            slots: self.slots,
            warmup: self.warmup,
            seed: self.seed,
            replications: self.replications,
            max_tracked_state: self.max_tracked_state,
        }
    }

    pub fn validated(&self) -> Result<ValidatedSpec, SpecErrors> {
        validate_spec(self.model_spec())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Expand the grid into per-cell configs, rule-major then alpha then
    /// beta. Cell `i` is seeded `seed + i`; the cell carries no grid.
    pub fn cells(&self) -> Result<Vec<ExperimentConfig>, ConfigError> {
        let grid = self.grid.clone().unwrap_or_default();
        let rules = grid.rule.unwrap_or_else(|| vec![self.rule]);
        let alphas: Vec<Option<f64>> = match grid.alpha {
            Some(v) => {
                if !matches!(self.arrival, ArrivalSpec::Bernoulli { .. }) {
                    return Err(ConfigError::Grid(
                        "alpha values need a bernoulli arrival".into(),
                    ));
                }
                v.into_iter().map(Some).collect()
            }
            None => vec![None],
        };
        let betas: Vec<Option<f64>> = match grid.beta {
            Some(v) => {
                if !matches!(self.service, ServiceSpec::Geometric { .. }) {
                    return Err(ConfigError::Grid(
                        "beta values need a geometric service".into(),
                    ));
                }
                v.into_iter().map(Some).collect()
            }
            None => vec![None],
        };
        let mut cells = Vec::new();
        for &rule in &rules {
            for alpha in &alphas {
                for beta in &betas {
                    let mut cell = self.clone();
                    cell.grid = None;
                    cell.rule = rule;
                    if let Some(alpha) = *alpha {
                        cell.arrival = ArrivalSpec::Bernoulli { alpha };
                    }
                    if let Some(beta) = *beta {
                        cell.service = ServiceSpec::Geometric { beta };
                    }
                    cell.seed = self.seed.wrapping_add(cells.len() as u64);
                    cells.push(cell);
                }
            }
        }
        if cells.is_empty() {
            return Err(ConfigError::Grid("empty grid".into()));
        }
        Ok(cells)
    }
}

/// Parse and validate a config document. Serde diagnostics carry the line
/// and column of the offending field.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(text)?;
    cfg.validated()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config_str(&text)
}
