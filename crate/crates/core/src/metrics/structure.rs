//! Section, citation and cross-reference metrics.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{MetricDetails, MetricName, MetricScore};
use crate::parse::{BibEntry, CitationCommand, LabelDef, LabelKind, RefCommand, SectionHeading, SectionLevel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCheck {
    pub title: String,
    pub level: SectionLevel,
    pub matched_reference: Option<usize>,
    /// Whether the matched reference heading uses the same command level.
    pub level_matches: Option<bool>,
    pub correct: bool,
}

fn titles_match(a: &str, b: &str) -> bool {
    !a.is_empty() && !b.is_empty() && (a.contains(b) || b.contains(a))
}

fn section_checks(
    reference: &[SectionHeading],
    predicted: &[SectionHeading],
    hierarchical: bool,
) -> Vec<SectionCheck> {
    let mut used = vec![false; reference.len()];
    predicted
        .iter()
        .map(|p| {
            let hit = reference.iter().enumerate().position(|(i, r)| {
                !used[i] && titles_match(&p.title_normalized, &r.title_normalized)
            });
            if let Some(i) = hit {
                used[i] = true;
            }
            let level_matches = hit.map(|i| reference[i].level == p.level);
            let correct = match level_matches {
                Some(same) => same || !hierarchical,
                None => false,
            };
            SectionCheck {
                title: p.title_normalized.clone(),
                level: p.level,
                matched_reference: hit,
                level_matches,
                correct,
            }
        })
        .collect()
}

/// Precision of predicted section titles under bidirectional substring
/// inclusion, each reference heading used at most once.
pub fn score_sa(reference: &[SectionHeading], predicted: &[SectionHeading]) -> MetricScore {
    let details = MetricDetails::Sa {
        predicted: section_checks(reference, predicted, false),
        reference_total: reference.len(),
        hierarchical: false,
    };
    MetricScore::from_details(MetricName::Sa, details)
}

/// [`score_sa`] that also requires the matched headings to share a level.
pub fn score_sa_hierarchical(reference: &[SectionHeading], predicted: &[SectionHeading]) -> MetricScore {
    let details = MetricDetails::Sa {
        predicted: section_checks(reference, predicted, true),
        reference_total: reference.len(),
        hierarchical: true,
    };
    MetricScore::from_details(MetricName::Sa, details)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyValidity {
    /// A positive integer no larger than the number of BibTeX entries.
    NumericIndex,
    /// A substring of the concatenated BibTeX text.
    InBibliography,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCheck {
    pub key: String,
    pub validity: KeyValidity,
}

impl KeyCheck {
    pub fn valid(&self) -> bool {
        self.validity != KeyValidity::Invalid
    }
}

/// Validity of every generated citation key occurrence against the
/// generated BibTeX, over the number of reference key occurrences, capped
/// at 1.
pub fn score_cc(
    reference: &[CitationCommand],
    generated: &[CitationCommand],
    gen_bib: &[BibEntry],
) -> MetricScore {
    let bib_text: String = gen_bib.iter().map(|e| e.body_raw.as_str()).collect();
    let generated = generated
        .iter()
        .flat_map(|c| &c.keys)
        .map(|key| {
            let numeric = key
                .parse::<usize>()
                .is_ok_and(|n| n >= 1 && n <= gen_bib.len());
            let validity = if numeric {
                KeyValidity::NumericIndex
            } else if bib_text.contains(key.as_str()) {
                KeyValidity::InBibliography
            } else {
                KeyValidity::Invalid
            };
            KeyCheck {
                key: key.clone(),
                validity,
            }
        })
        .collect();
    let details = MetricDetails::Cc {
        generated,
        reference_total: reference.iter().map(|c| c.keys.len()).sum(),
        bib_entries: gen_bib.len(),
    };
    MetricScore::from_details(MetricName::Cc, details)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCheck {
    pub key: String,
    pub kind: LabelKind,
    pub reference_count: usize,
    pub generated_count: usize,
    pub correct: bool,
}

fn ref_counts(refs: &[RefCommand]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for r in refs {
        *m.entry(r.key.as_str()).or_default() += 1;
    }
    m
}

/// Share of the reference's figure and table labels that the generated
/// text references exactly as often as the reference does.
pub fn score_rv(ref_labels: &[LabelDef], ref_refs: &[RefCommand], gen_refs: &[RefCommand]) -> MetricScore {
    let rc = ref_counts(ref_refs);
    let gc = ref_counts(gen_refs);
    let mut seen = HashSet::new();
    let labels = ref_labels
        .iter()
        .filter(|l| matches!(l.kind, LabelKind::Figure | LabelKind::Table))
        .filter(|l| seen.insert(l.key.as_str()))
        .map(|l| {
            let reference_count = rc.get(l.key.as_str()).copied().unwrap_or(0);
            let generated_count = gc.get(l.key.as_str()).copied().unwrap_or(0);
            LabelCheck {
                key: l.key.clone(),
                kind: l.kind,
                reference_count,
                generated_count,
                correct: reference_count == generated_count,
            }
        })
        .collect();
    MetricScore::from_details(MetricName::Rv, MetricDetails::Rv { labels })
}
