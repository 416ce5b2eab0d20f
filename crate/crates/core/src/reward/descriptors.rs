use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{RewardConfig, RewardError, RewardResult, UnitTestOutcome};
use crate::compile::CompileProbe;
use crate::metrics::{page_sanity, score_ctp_texts, score_fa, score_sa_hierarchical, score_ta, MetricName};
use crate::normalize::normalize_levenshtein_capped;
use crate::parse::{
    page_anchor_sentences, strip_comments, LabelKind, MathBlock, RawPage, SectionHeading,
    StructuralIndex, TableBlock,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Anchors,
    Tables,
    Formulas,
    Sections,
    Citations,
    References,
    Sanity,
    Similarity,
    Compile,
}

impl TestKind {
    pub fn metric_origin(self) -> MetricName {
        match self {
            TestKind::Anchors => MetricName::Ctp,
            TestKind::Tables => MetricName::Ta,
            TestKind::Formulas => MetricName::Fa,
            TestKind::Sections => MetricName::Sa,
            TestKind::Citations => MetricName::Cc,
            TestKind::References => MetricName::Rv,
            TestKind::Sanity => MetricName::Baseline,
            TestKind::Similarity => MetricName::Ds,
            TestKind::Compile => MetricName::Csr,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            TestKind::Anchors => "fidelity.anchors",
            TestKind::Tables => "fidelity.tables",
            TestKind::Formulas => "fidelity.formulas",
            TestKind::Sections => "structure.sections",
            TestKind::Citations => "structure.citations",
            TestKind::References => "structure.references",
            TestKind::Sanity => "usability.sanity",
            TestKind::Similarity => "usability.similarity",
            TestKind::Compile => "usability.compile",
        }
    }
}

/// How the citation test reads a reference page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CitationMode {
    /// Body page: the generated page must reproduce the reference page's
    /// citation keys, each reference occurrence matched at most once.
    Commands { keys: Vec<String> },
    /// Bibliography page: the generated page must emit BibTeX entries with
    /// the reference keys.
    BibKeys { keys: Vec<String> },
}

/// Reference-side data a test needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestSpec {
    Anchors { anchors: Vec<String> },
    Tables { tables: Vec<TableBlock> },
    Formulas { formulas: Vec<MathBlock> },
    Sections { sections: Vec<SectionHeading> },
    Citations(CitationMode),
    /// Figure and table keys with their reference-page ref counts.
    References { keys: Vec<(String, usize)> },
    Sanity,
    Similarity { reference_text: String },
    Compile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDescriptor {
    pub test_id: String,
    pub kind: TestKind,
    /// The reference page has nothing of this kind; the test always passes.
    pub vacuous: bool,
    pub threshold: Option<f64>,
    /// Number of reference elements the test checks.
    pub elements: usize,
    pub spec: TestSpec,
}

/// A parsed reference page, reusable across many generated completions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePage {
    pub page: RawPage,
    pub index: StructuralIndex,
    pub anchors: Vec<String>,
}

impl ReferencePage {
    pub fn new(page: RawPage, cfg: &RewardConfig) -> Self {
        let index = StructuralIndex::build(&page.text, &cfg.metrics.anchor);
        let anchors = page_anchor_sentences(&strip_comments(&page.text), &cfg.metrics.anchor);
        Self {
            page,
            index,
            anchors,
        }
    }
}

fn descriptor(kind: TestKind, elements: usize, threshold: Option<f64>, spec: TestSpec) -> TestDescriptor {
    let vacuous = elements == 0 && !matches!(kind, TestKind::Sanity | TestKind::Similarity | TestKind::Compile);
    TestDescriptor {
        test_id: kind.id().to_string(),
        kind,
        vacuous,
        threshold,
        elements,
        spec,
    }
}

fn is_float_key(key: &str) -> bool {
    matches!(LabelKind::from_key(key), Some(LabelKind::Figure | LabelKind::Table))
}

/// The test set for one reference page: nine tests, or eight when the
/// compile test is disabled.
pub fn instantiate_tests(reference: &ReferencePage, cfg: &RewardConfig) -> Vec<TestDescriptor> {
    let idx = &reference.index;
    let t = &cfg.thresholds;
    let mut out = Vec::with_capacity(9);

    out.push(descriptor(
        TestKind::Anchors,
        reference.anchors.len(),
        Some(1.0),
        TestSpec::Anchors {
            anchors: reference.anchors.clone(),
        },
    ));
    let numeric_tables: Vec<TableBlock> = idx.tables.iter().filter(|t| !t.numbers.is_empty()).cloned().collect();
    out.push(descriptor(
        TestKind::Tables,
        numeric_tables.len(),
        Some(t.ta),
        TestSpec::Tables {
            tables: numeric_tables,
        },
    ));
    out.push(descriptor(
        TestKind::Formulas,
        idx.math.len(),
        Some(t.fa),
        TestSpec::Formulas {
            formulas: idx.math.clone(),
        },
    ));
    out.push(descriptor(
        TestKind::Sections,
        idx.sections.len(),
        Some(t.sa),
        TestSpec::Sections {
            sections: idx.sections.clone(),
        },
    ));

    let mode = if !idx.bib.is_empty() {
        CitationMode::BibKeys {
            keys: idx.bib.iter().map(|e| e.key.clone()).collect(),
        }
    } else {
        CitationMode::Commands {
            keys: idx.citation_keys().map(str::to_string).collect(),
        }
    };
    let n = match &mode {
        CitationMode::Commands { keys } | CitationMode::BibKeys { keys } => keys.len(),
    };
    out.push(descriptor(TestKind::Citations, n, Some(t.cc), TestSpec::Citations(mode)));

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in &idx.refs {
        *counts.entry(r.key.as_str()).or_default() += 1;
    }
    let keys: BTreeSet<&str> = idx
        .float_labels()
        .map(|l| l.key.as_str())
        .chain(idx.refs.iter().map(|r| r.key.as_str()).filter(|k| is_float_key(k)))
        .collect();
    let keys: Vec<(String, usize)> = keys
        .into_iter()
        .map(|k| (k.to_string(), counts.get(k).copied().unwrap_or(0)))
        .collect();
    out.push(descriptor(TestKind::References, keys.len(), Some(t.rv), TestSpec::References { keys }));

    out.push(descriptor(TestKind::Sanity, 1, None, TestSpec::Sanity));
    out.push(descriptor(
        TestKind::Similarity,
        1,
        Some(t.ds),
        TestSpec::Similarity {
            reference_text: reference.page.text.clone(),
        },
    ));
    if cfg.compile_test {
        out.push(descriptor(TestKind::Compile, 1, None, TestSpec::Compile));
    }
    out
}

fn multiset_recall(reference: &[String], generated: impl Iterator<Item = String>) -> f64 {
    if reference.is_empty() {
        return 1.0;
    }
    let mut avail: HashMap<String, usize> = HashMap::new();
    for k in generated {
        *avail.entry(k).or_default() += 1;
    }
    let hit = reference
        .iter()
        .filter(|k| match avail.get_mut(k.as_str()) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        })
        .count();
    hit as f64 / reference.len() as f64
}

/// Run every test against one generated page.
///
/// A compile test without a probe is an error, never a silent failure.
pub fn run_tests(
    gen_page: &RawPage,
    tests: &[TestDescriptor],
    cfg: &RewardConfig,
    probe: Option<&CompileProbe>,
) -> Result<RewardResult, RewardError> {
    let gen = StructuralIndex::build(&gen_page.text, &cfg.metrics.anchor);
    let mut outcomes = Vec::with_capacity(tests.len());
    for d in tests {
        let origin = d.kind.metric_origin();
        let thresholded = |observed: f64| {
            UnitTestOutcome::thresholded(&d.test_id, origin, observed, d.threshold.unwrap_or(1.0), d.vacuous)
        };
        let outcome = match &d.spec {
            TestSpec::Anchors { anchors } => thresholded(score_ctp_texts(anchors, &gen_page.text).value),
            TestSpec::Tables { tables } => thresholded(score_ta(tables, &gen.tables, &cfg.metrics).value),
            TestSpec::Formulas { formulas } => {
                thresholded(score_fa(formulas, &gen.math, &cfg.metrics).value)
            }
            TestSpec::Sections { sections } => {
                let observed = if sections.is_empty() {
                    1.0
                } else {
                    score_sa_hierarchical(sections, &gen.sections).value
                };
                thresholded(observed)
            }
            TestSpec::Citations(CitationMode::Commands { keys }) => {
                thresholded(multiset_recall(keys, gen.citation_keys().map(str::to_string)))
            }
            TestSpec::Citations(CitationMode::BibKeys { keys }) => {
                thresholded(multiset_recall(keys, gen.bib.iter().map(|e| e.key.clone())))
            }
            TestSpec::References { keys } => {
                let observed = if keys.is_empty() {
                    1.0
                } else {
                    let correct = keys
                        .iter()
                        .filter(|(k, n)| gen.refs.iter().filter(|r| &r.key == k).count() == *n)
                        .count();
                    correct as f64 / keys.len() as f64
                };
                thresholded(observed)
            }
            TestSpec::Sanity => {
                let check = page_sanity(gen_page, &cfg.metrics);
                let o = UnitTestOutcome::binary(&d.test_id, origin, check.valid());
                match check.failures.first() {
                    Some(f) => o.with_note(format!("{f:?}")),
                    None => o,
                }
            }
            // Raw page text: cutting BibTeX here would leave a bibliography
            // page with nothing to compare.
            TestSpec::Similarity { reference_text } => thresholded(normalize_levenshtein_capped(
                reference_text,
                &gen_page.text,
                cfg.metrics.ds_length_cap,
            )),
            TestSpec::Compile => {
                let probe = probe.ok_or(RewardError::CompileUnavailable)?;
                let r = probe.compile_snippet_with(gen_page, &cfg.compile_limits.single_run())?;
                let o = UnitTestOutcome::binary(&d.test_id, origin, r.success);
                if r.success {
                    o
                } else {
                    o.with_note(r.log_excerpt)
                }
            }
        };
        outcomes.push(outcome);
    }
    RewardResult::from_outcomes(outcomes, cfg.thresholds.clone())
}
