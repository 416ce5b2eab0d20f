//! Page-level unit tests and the pass-fraction reward.
//!
//! Each reference page yields a fixed set of binary tests, one per metric
//! family: anchor recovery, table numbers, formulas, section hierarchy,
//! citation keys, figure/table references, page sanity, edit-distance
//! similarity and (optionally) a compile probe. A generated page's reward
//! is the fraction of tests it passes. Tests whose element class is absent
//! from the reference page pass and are flagged vacuous, so the test count
//! stays fixed.

mod descriptors;

use serde::{Deserialize, Serialize};

use crate::compile::{CompileError, CompileLimits};
use crate::metrics::{check_ratio, ConfigError, MetricConfig, MetricName};

pub use descriptors::{instantiate_tests, run_tests, CitationMode, ReferencePage, TestDescriptor, TestKind, TestSpec};

#[derive(Debug, thiserror::Error)]
pub enum RewardError {
    #[error("no unit tests to run")]
    NoTests,
    #[error("the compile test needs a LaTeX engine, but none is configured")]
    CompileUnavailable,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Pass thresholds for the continuous tests. Anchor recovery always
/// requires every page anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardThresholds {
    pub ds: f64,
    pub fa: f64,
    pub ta: f64,
    pub sa: f64,
    pub cc: f64,
    pub rv: f64,
}

impl Default for RewardThresholds {
    fn default() -> Self {
        Self {
            ds: 0.85,
            fa: 0.8,
            ta: 0.8,
            sa: 0.8,
            cc: 0.8,
            rv: 0.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub thresholds: RewardThresholds,
    /// Include the snippet compile test.
    pub compile_test: bool,
    pub compile_limits: CompileLimits,
    pub metrics: MetricConfig,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            thresholds: RewardThresholds::default(),
            compile_test: true,
            compile_limits: CompileLimits::default(),
            metrics: MetricConfig::default(),
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.thresholds;
        check_ratio("thresholds.ds", t.ds)?;
        check_ratio("thresholds.fa", t.fa)?;
        check_ratio("thresholds.ta", t.ta)?;
        check_ratio("thresholds.sa", t.sa)?;
        check_ratio("thresholds.cc", t.cc)?;
        check_ratio("thresholds.rv", t.rv)?;
        self.metrics.validate()
    }
}

/// Result of one binary test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitTestOutcome {
    pub test_id: String,
    pub metric_origin: MetricName,
    pub passed: bool,
    /// The continuous value behind the verdict, when there is one.
    pub observed: Option<f64>,
    pub threshold: Option<f64>,
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl UnitTestOutcome {
    /// A thresholded outcome: passes iff `observed >= threshold`.
    pub fn thresholded(
        test_id: impl Into<String>,
        origin: MetricName,
        observed: f64,
        threshold: f64,
        vacuous: bool,
    ) -> Self {
        Self {
            test_id: test_id.into(),
            metric_origin: origin,
            passed: observed >= threshold,
            observed: Some(observed),
            threshold: Some(threshold),
            vacuous,
            note: None,
        }
    }

    pub fn binary(test_id: impl Into<String>, origin: MetricName, passed: bool) -> Self {
        Self {
            test_id: test_id.into(),
            metric_origin: origin,
            passed,
            observed: None,
            threshold: None,
            vacuous: false,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResult {
    /// Passed tests over total tests.
    pub reward: f64,
    pub outcomes: Vec<UnitTestOutcome>,
    pub test_count: usize,
    pub thresholds: RewardThresholds,
}

impl RewardResult {
    pub fn from_outcomes(
        outcomes: Vec<UnitTestOutcome>,
        thresholds: RewardThresholds,
    ) -> Result<Self, RewardError> {
        if outcomes.is_empty() {
            return Err(RewardError::NoTests);
        }
        let passed = outcomes.iter().filter(|o| o.passed).count();
        Ok(Self {
            reward: passed as f64 / outcomes.len() as f64,
            test_count: outcomes.len(),
            outcomes,
            thresholds,
        })
    }

    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed).count()
    }
}
