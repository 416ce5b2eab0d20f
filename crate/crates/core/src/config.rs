//! The single configuration file shared by the CLI and the service.
//!
//! ```toml
//! [metrics]
//! formula_align_threshold = 0.7
//!
//! [reward.thresholds]
//! ds = 0.85
//!
//! [compile]
//! workers = 4
//! limits = { timeout_secs = 60, max_runs = 2 }
//! ```
//!
//! Every section is optional and falls back to its defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assembly::Preamble;
use crate::compile::CompileConfig;
use crate::metrics::{ConfigError, MetricConfig};
use crate::reward::{RewardConfig, RewardThresholds};

#[derive(Debug, thiserror::Error)]
pub enum ConfigLoadError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardSettings {
    pub thresholds: RewardThresholds,
    pub compile_test: bool,
}

impl Default for RewardSettings {
    fn default() -> Self {
        Self {
            thresholds: RewardThresholds::default(),
            compile_test: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub metrics: MetricConfig,
    pub reward: RewardSettings,
    pub compile: CompileConfig,
    pub preamble: Preamble,
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigLoadError> {
        let cfg: Config = toml::from_str(s).map_err(|source| ConfigLoadError::Parse {
            path: "<string>".into(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigLoadError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigLoadError::Io {
            path: shown.clone(),
            source,
        })?;
        let cfg: Config = toml::from_str(&text).map_err(|source| ConfigLoadError::Parse {
            path: shown,
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.reward_config().validate()
    }

    pub fn reward_config(&self) -> RewardConfig {
        RewardConfig {
            thresholds: self.reward.thresholds.clone(),
            compile_test: self.reward.compile_test,
            compile_limits: self.compile.limits.clone(),
            metrics: self.metrics.clone(),
        }
    }

    /// Hash of every setting that can influence a score. Engine path and
    /// worker count are excluded; they do not change results.
    pub fn hash(&self) -> String {
        let scoring = serde_json::json!({
            "metrics": self.metrics,
            "reward": self.reward,
            "limits": self.compile.limits,
            "preamble": self.preamble.fingerprint(),
        });
        let digest = Sha256::digest(scoring.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}
