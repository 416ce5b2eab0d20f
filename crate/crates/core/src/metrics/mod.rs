//! The nine-metric evaluation suite.
//!
//! Eight metrics are computed from text alone; Compilation Success Rate
//! comes from a compile probe (see [`crate::compile`]). Every score keeps
//! the evidence it was computed from in [`MetricDetails`], and
//! [`MetricDetails::recompute`] rebuilds the value from that evidence.

mod baseline;
mod config;
mod evaluate;
mod formulas;
mod report;
mod structure;
mod tables;
mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use baseline::{page_sanity, score_baseline, trailing_repetition, SanityFailure};
pub use config::{ConfigError, MetricConfig};
pub(crate) use config::check_ratio;
pub use evaluate::{evaluate_text_metrics, score_csr, ParsedDocument, TextScores};
pub use formulas::{align_formulas, score_fa, FormulaAlignment};
pub use report::{aggregate_report, aggregate_values, DocumentReport, GroupScores};
pub use structure::{score_cc, score_rv, score_sa, score_sa_hierarchical};
pub use tables::{score_ta, table_match, TableMatch};
pub use text::{score_ctp, score_ctp_texts, score_ds};

pub use baseline::PageCheck;
pub use formulas::FormulaCheck;
pub use structure::{KeyCheck, KeyValidity, LabelCheck, SectionCheck};
pub use tables::TableCheck;
pub use text::AnchorCheck;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("document has no pages")]
    EmptyDocument,
    #[error("incomplete score set: missing {0:?}")]
    IncompleteScores(Vec<MetricName>),
    #[error("duplicate score for {0}")]
    DuplicateScore(MetricName),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricName {
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "CC")]
    Cc,
    #[serde(rename = "RV")]
    Rv,
    #[serde(rename = "DS")]
    Ds,
    #[serde(rename = "Baseline")]
    Baseline,
    #[serde(rename = "CSR")]
    Csr,
    #[serde(rename = "CTP")]
    Ctp,
    #[serde(rename = "FA")]
    Fa,
    #[serde(rename = "TA")]
    Ta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricGroup {
    Structural,
    Usability,
    Fidelity,
}

impl MetricName {
    /// Table column order: structural, usability, fidelity.
    pub const ALL: [MetricName; 9] = [
        MetricName::Sa,
        MetricName::Cc,
        MetricName::Rv,
        MetricName::Ds,
        MetricName::Baseline,
        MetricName::Csr,
        MetricName::Ctp,
        MetricName::Fa,
        MetricName::Ta,
    ];

    pub fn group(self) -> MetricGroup {
        match self {
            MetricName::Sa | MetricName::Cc | MetricName::Rv => MetricGroup::Structural,
            MetricName::Ds | MetricName::Baseline | MetricName::Csr => MetricGroup::Usability,
            MetricName::Ctp | MetricName::Fa | MetricName::Ta => MetricGroup::Fidelity,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Sa => "SA",
            MetricName::Cc => "CC",
            MetricName::Rv => "RV",
            MetricName::Ds => "DS",
            MetricName::Baseline => "Baseline",
            MetricName::Csr => "CSR",
            MetricName::Ctp => "CTP",
            MetricName::Fa => "FA",
            MetricName::Ta => "TA",
        }
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|m| *m == self).expect("listed")
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// One metric value in `[0, 1]` with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub name: MetricName,
    pub value: f64,
    pub details: MetricDetails,
}

impl MetricScore {
    /// Build a score whose value is recomputed from `details`.
    pub fn from_details(name: MetricName, details: MetricDetails) -> Self {
        let value = details.recompute();
        debug_assert!((0.0..=1.0).contains(&value), "{name} out of range: {value}");
        Self {
            name,
            value,
            details,
        }
    }

    /// A score with no per-item evidence, e.g. a value read from a table.
    pub fn precomputed(name: MetricName, value: f64) -> Self {
        Self {
            name,
            value,
            details: MetricDetails::Precomputed { value },
        }
    }

    /// True when the reference offered nothing to check and the score is 1.0
    /// by convention.
    pub fn is_vacuous(&self) -> bool {
        self.details.is_vacuous()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricDetails {
    Ctp {
        anchors: Vec<AnchorCheck>,
    },
    Ds {
        reference_chars: usize,
        generated_chars: usize,
        distance: usize,
        bib_entries_removed: usize,
        length_cap: Option<usize>,
    },
    Ta {
        tables: Vec<TableCheck>,
        /// Reference tables without any numbers; not counted.
        excluded_empty: usize,
        high_overlap: f64,
        moderate_overlap: f64,
        unique_hit: f64,
    },
    Fa {
        formulas: Vec<FormulaCheck>,
        align_threshold: f64,
    },
    Baseline {
        pages: Vec<PageCheck>,
        repetition_max_n: usize,
        repetition_min_repeats: usize,
    },
    Sa {
        predicted: Vec<SectionCheck>,
        reference_total: usize,
        hierarchical: bool,
    },
    Cc {
        generated: Vec<KeyCheck>,
        reference_total: usize,
        bib_entries: usize,
    },
    Rv {
        labels: Vec<LabelCheck>,
    },
    Csr {
        success: bool,
        engine: String,
        timed_out: bool,
        duration_secs: f64,
        log_excerpt: String,
    },
    Precomputed {
        value: f64,
    },
}

fn ratio(num: usize, den: usize) -> f64 {
    num as f64 / den as f64
}

impl MetricDetails {
    pub fn recompute(&self) -> f64 {
        match self {
            MetricDetails::Ctp { anchors } => {
                if anchors.is_empty() {
                    1.0
                } else {
                    ratio(anchors.iter().filter(|a| a.found).count(), anchors.len())
                }
            }
            MetricDetails::Ds {
                reference_chars,
                generated_chars,
                distance,
                ..
            } => {
                let longest = (*reference_chars).max(*generated_chars);
                if longest == 0 {
                    1.0
                } else {
                    1.0 - ratio(*distance, longest)
                }
            }
            MetricDetails::Ta { tables, .. } => {
                if tables.is_empty() {
                    1.0
                } else {
                    ratio(tables.iter().filter(|t| t.matched).count(), tables.len())
                }
            }
            MetricDetails::Fa { formulas, .. } => {
                if formulas.is_empty() {
                    1.0
                } else {
                    ratio(formulas.iter().filter(|f| f.correct).count(), formulas.len())
                }
            }
            MetricDetails::Baseline { pages, .. } => {
                if pages.is_empty() {
                    0.0
                } else {
                    ratio(pages.iter().filter(|p| p.valid()).count(), pages.len())
                }
            }
            MetricDetails::Sa { predicted, .. } => {
                if predicted.is_empty() {
                    0.0
                } else {
                    ratio(
                        predicted.iter().filter(|p| p.correct).count(),
                        predicted.len(),
                    )
                }
            }
            MetricDetails::Cc {
                generated,
                reference_total,
                ..
            } => {
                if *reference_total == 0 {
                    1.0
                } else {
                    let valid = generated.iter().filter(|k| k.valid()).count();
                    ratio(valid, *reference_total).min(1.0)
                }
            }
            MetricDetails::Rv { labels } => {
                if labels.is_empty() {
                    1.0
                } else {
                    ratio(labels.iter().filter(|l| l.correct).count(), labels.len())
                }
            }
            MetricDetails::Csr { success, .. } => {
                if *success {
                    1.0
                } else {
                    0.0
                }
            }
            MetricDetails::Precomputed { value } => *value,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        match self {
            MetricDetails::Ctp { anchors } => anchors.is_empty(),
            MetricDetails::Ta { tables, .. } => tables.is_empty(),
            MetricDetails::Fa { formulas, .. } => formulas.is_empty(),
            MetricDetails::Cc {
                reference_total, ..
            } => *reference_total == 0,
            MetricDetails::Rv { labels } => labels.is_empty(),
            _ => false,
        }
    }

    /// SA with zero predicted sections.
    pub fn is_no_structure(&self) -> bool {
        matches!(self, MetricDetails::Sa { predicted, .. } if predicted.is_empty())
    }
}
