use serde::{Deserialize, Serialize};

use crate::parse::AnchorConfig;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{name} = {value} is outside (0, 1]")]
    RatioOutOfRange { name: &'static str, value: f64 },
    #[error("table_moderate_overlap ({moderate}) must be below table_high_overlap ({high})")]
    OverlapOrder { moderate: f64, high: f64 },
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("anchor window [{min}, {max}] is empty")]
    AnchorWindow { min: usize, max: usize },
}

/// Thresholds used by the metrics. Every value is echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub formula_align_threshold: f64,
    pub table_high_overlap: f64,
    pub table_moderate_overlap: f64,
    pub table_unique_hit: f64,
    pub repetition_max_n: usize,
    pub repetition_min_repeats: usize,
    pub anchor: AnchorConfig,
    /// Optional cap on the characters compared by DS. Off by default.
    pub ds_length_cap: Option<usize>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            formula_align_threshold: 0.7,
            table_high_overlap: 0.9,
            table_moderate_overlap: 0.6,
            table_unique_hit: 0.8,
            repetition_max_n: 30,
            repetition_min_repeats: 3,
            anchor: AnchorConfig::default(),
            ds_length_cap: None,
        }
    }
}

pub(crate) fn check_ratio(name: &'static str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value <= 1.0 {
        Ok(())
    } else {
        Err(ConfigError::RatioOutOfRange { name, value })
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        check_ratio("formula_align_threshold", self.formula_align_threshold)?;
        check_ratio("table_high_overlap", self.table_high_overlap)?;
        check_ratio("table_moderate_overlap", self.table_moderate_overlap)?;
        check_ratio("table_unique_hit", self.table_unique_hit)?;
        if self.table_moderate_overlap >= self.table_high_overlap {
            return Err(ConfigError::OverlapOrder {
                moderate: self.table_moderate_overlap,
                high: self.table_high_overlap,
            });
        }
        if self.repetition_max_n == 0 {
            return Err(ConfigError::ZeroCount("repetition_max_n"));
        }
        if self.repetition_min_repeats < 2 {
            return Err(ConfigError::ZeroCount("repetition_min_repeats - 1"));
        }
        if self.anchor.min_chars > self.anchor.max_chars {
            return Err(ConfigError::AnchorWindow {
                min: self.anchor.min_chars,
                max: self.anchor.max_chars,
            });
        }
        Ok(())
    }
}
