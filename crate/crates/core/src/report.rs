//! Corpus evaluation, batch rewards and report serialization.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{build_project_with, merge_pages, AssemblyError};
use crate::compile::{CompileError, CompileLimits, CompileProbe};
use crate::config::Config;
use crate::corpus::{EvalRecord, ReferenceCorpus};
use crate::metrics::{
    aggregate_values, evaluate_text_metrics, score_csr, DocumentReport, MetricConfig,
    MetricError, MetricName, ParsedDocument,
};
use crate::parse::RawPage;
use crate::reward::{instantiate_tests, run_tests, RewardError, RewardResult, RewardThresholds};

/// Version of the JSON report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("input: {0}")]
    InvalidInput(String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// A document that could not be scored; it is left out of the means.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentError {
    pub doc_id: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMeans {
    pub metrics: BTreeMap<MetricName, f64>,
    pub structural: f64,
    pub usability: f64,
    pub fidelity: f64,
    pub overall: f64,
}

/// Every setting that influenced a score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub config_hash: String,
    pub metrics: MetricConfig,
    pub reward_thresholds: RewardThresholds,
    pub compile_limits: CompileLimits,
    pub engine: Option<String>,
    pub preamble_fingerprint: String,
}

impl ConfigEcho {
    pub fn new(cfg: &Config, engine: Option<&str>) -> Self {
        Self {
            config_hash: cfg.hash(),
            metrics: cfg.metrics.clone(),
            reward_thresholds: cfg.reward.thresholds.clone(),
            compile_limits: cfg.compile.limits.clone(),
            engine: engine.map(str::to_string),
            preamble_fingerprint: cfg.preamble.fingerprint(),
        }
    }
}

/// Run metadata kept apart from the scores so reruns compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool_version: String,
    pub generated_unix: u64,
}

impl ReportMetadata {
    pub fn now() -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub documents: Vec<DocumentReport>,
    pub errors: Vec<DocumentError>,
    /// Unweighted means over `documents`; absent for an empty corpus.
    pub means: Option<CorpusMeans>,
    pub config: ConfigEcho,
    pub metadata: ReportMetadata,
}

impl CorpusReport {
    pub fn from_documents(
        mut documents: Vec<DocumentReport>,
        mut errors: Vec<DocumentError>,
        config: ConfigEcho,
    ) -> Self {
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        errors.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        let means = corpus_means(&documents);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            documents,
            errors,
            means,
            config,
            metadata: ReportMetadata::now(),
        }
    }
}

fn corpus_means(docs: &[DocumentReport]) -> Option<CorpusMeans> {
    if docs.is_empty() {
        return None;
    }
    let n = docs.len() as f64;
    let mut values = [0.0; 9];
    for d in docs {
        for (acc, v) in values.iter_mut().zip(d.values()) {
            *acc += v;
        }
    }
    for v in &mut values {
        *v /= n;
    }
    let mean = |f: fn(&DocumentReport) -> f64| docs.iter().map(f).sum::<f64>() / n;
    let metrics = MetricName::ALL.iter().map(|m| (*m, values[m.index()])).collect();
    Some(CorpusMeans {
        metrics,
        structural: mean(|d| d.groups.structural),
        usability: mean(|d| d.groups.usability),
        fidelity: mean(|d| d.groups.fidelity),
        overall: mean(|d| d.groups.overall),
    })
}

struct DocInput {
    doc_id: String,
    generated: Vec<RawPage>,
    reference: Option<Vec<RawPage>>,
}

fn group_documents(records: &[EvalRecord], references: Option<&ReferenceCorpus>) -> Result<Vec<DocInput>, RunError> {
    let mut by_doc: BTreeMap<&str, Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        if r.completion_index != 0 {
            return Err(RunError::InvalidInput(format!(
                "{:?} page {}: evaluate takes one completion per page",
                r.doc_id, r.page_index
            )));
        }
        by_doc.entry(r.doc_id.as_str()).or_default().push(r);
    }
    Ok(by_doc
        .into_iter()
        .map(|(doc_id, recs)| {
            let generated = recs.iter().map(|r| r.generated_page()).collect();
            let reference = match references {
                Some(c) => Some(c.document(doc_id)).filter(|p| !p.is_empty()),
                None => recs.iter().map(|r| r.reference_page()).collect(),
            };
            DocInput {
                doc_id: doc_id.to_string(),
                generated,
                reference,
            }
        })
        .collect())
}

enum DocOutcome {
    Scored(DocumentReport),
    Skipped(DocumentError),
}

#[derive(Debug, thiserror::Error)]
enum DocFailure {
    #[error("no reference pages")]
    MissingReference,
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

fn evaluate_document(doc: DocInput, cfg: &Config, probe: &CompileProbe) -> Result<DocOutcome, RunError> {
    let doc_id = doc.doc_id.clone();
    let scored = (|| -> Result<Result<DocumentReport, CompileError>, DocFailure> {
        let reference = doc.reference.ok_or(DocFailure::MissingReference)?;
        let reference = ParsedDocument::new(merge_pages(reference)?, &cfg.metrics);
        let generated = ParsedDocument::new(merge_pages(doc.generated)?, &cfg.metrics);
        let text = evaluate_text_metrics(&reference, &generated, &cfg.metrics)?;
        let project = build_project_with(&generated.source, &cfg.preamble);
        let compiled = match probe.compile_project(&project) {
            Ok(c) => c,
            Err(e) => return Ok(Err(e)),
        };
        Ok(Ok(text.into_report(&doc_id, score_csr(&compiled))?))
    })();
    match scored {
        Ok(Ok(report)) => Ok(DocOutcome::Scored(report)),
        Ok(Err(compile)) => Err(compile.into()),
        Err(e) => {
            log::warn!("skipping {doc_id}: {e}");
            Ok(DocOutcome::Skipped(DocumentError {
                doc_id,
                message: e.to_string(),
            }))
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))
}

/// Score every document in `records` against its reference.
///
/// References come from `references` when given, otherwise from the
/// records' inline `reference` fields. Documents that cannot be scored are
/// listed in `errors` and the run continues; a compile infrastructure
/// failure aborts it.
pub fn run_evaluate(
    records: &[EvalRecord],
    references: Option<&ReferenceCorpus>,
    cfg: &Config,
    probe: &CompileProbe,
) -> Result<CorpusReport, RunError> {
    let docs = group_documents(records, references)?;
    let outcomes: Vec<DocOutcome> = pool(cfg.compile.workers)?.install(|| {
        docs.into_par_iter()
            .map(|d| evaluate_document(d, cfg, probe))
            .collect::<Result<_, _>>()
    })?;
    let mut documents = Vec::new();
    let mut errors = Vec::new();
    for o in outcomes {
        match o {
            DocOutcome::Scored(r) => documents.push(r),
            DocOutcome::Skipped(e) => errors.push(e),
        }
    }
    let echo = ConfigEcho::new(cfg, Some(probe.engine().identity()));
    Ok(CorpusReport::from_documents(documents, errors, echo))
}

/// One line of batch reward output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardLine {
    pub doc_id: String,
    pub page_index: usize,
    pub completion_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<RewardResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Reward for every record, in input order. Records without a reference
/// page get an `error` line; a compile infrastructure failure aborts the
/// batch.
pub fn run_reward_batch(
    records: &[EvalRecord],
    references: Option<&ReferenceCorpus>,
    cfg: &Config,
    probe: Option<&CompileProbe>,
) -> Result<Vec<RewardLine>, RewardError> {
    let rcfg = cfg.reward_config();
    rcfg.validate()?;
    let inline: Option<ReferenceCorpus> = match references {
        Some(_) => None,
        None => {
            let mut seen = HashSet::new();
            let pages: Vec<RawPage> = records
                .iter()
                .filter_map(|r| r.reference_page())
                .filter(|p| seen.insert((p.doc_id.clone(), p.page_index)))
                .collect();
            Some(ReferenceCorpus::new(pages, &rcfg))
        }
    };
    let corpus = references.or(inline.as_ref()).expect("one of the two is set");
    let workers = cfg.compile.workers.max(1);
    let score = |r: &EvalRecord| -> Result<RewardLine, RewardError> {
        let mut line = RewardLine {
            doc_id: r.doc_id.clone(),
            page_index: r.page_index,
            completion_index: r.completion_index,
            result: None,
            error: None,
        };
        match corpus.page(&r.doc_id, r.page_index) {
            None => line.error = Some("no reference page".to_string()),
            Some(reference) => {
                let tests = instantiate_tests(reference, &rcfg);
                line.result = Some(run_tests(&r.generated_page(), &tests, &rcfg, probe)?);
            }
        }
        Ok(line)
    };
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(p) => p.install(|| records.par_iter().map(score).collect()),
        Err(_) => records.iter().map(score).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Table,
}

/// Serialize a report as pretty JSON or as a plain-text table with the
/// nine metrics, three group averages and the overall score as
/// percentages.
pub fn emit_report(report: &CorpusReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Table => render_table(report).into_bytes(),
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<CorpusReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}

const COLUMNS: [&str; 13] = [
    "SA", "CC", "RV", "Avg", "DS", "Base", "CSR", "Avg", "CTP", "FA", "TA", "Avg", "Overall",
];

/// A table row: nine metric values in [`MetricName::ALL`] order, as
/// percentages with one decimal, with group averages and overall.
pub fn table_row(label: &str, values: &[f64; 9]) -> String {
    let g = aggregate_values(values);
    let pct = |v: f64| format!("{:.1}", v * 100.0);
    let mut cells: Vec<String> = Vec::with_capacity(13);
    cells.extend(values[0..3].iter().map(|v| pct(*v)));
    cells.push(pct(g.structural));
    cells.extend(values[3..6].iter().map(|v| pct(*v)));
    cells.push(pct(g.usability));
    cells.extend(values[6..9].iter().map(|v| pct(*v)));
    cells.push(pct(g.fidelity));
    cells.push(pct(g.overall));
    let mut line = format!("{label:<24}");
    for c in cells {
        let _ = write!(line, " {c:>7}");
    }
    line
}

fn render_table(report: &CorpusReport) -> String {
    let mut out = format!("{:<24}", "Document");
    for c in COLUMNS {
        let _ = write!(out, " {c:>7}");
    }
    out.push('\n');
    for d in &report.documents {
        out.push_str(&table_row(&d.doc_id, &d.values()));
        out.push('\n');
    }
    if let Some(m) = &report.means {
        let values: [f64; 9] = std::array::from_fn(|i| m.metrics[&MetricName::ALL[i]]);
        out.push_str(&table_row("Mean", &values));
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{} documents scored, {} skipped; config {}",
        report.documents.len(),
        report.errors.len(),
        report.config.config_hash
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{aggregate_report, MetricScore};

    fn doc(id: &str, v: f64) -> DocumentReport {
        let scores = MetricName::ALL.iter().map(|m| MetricScore::precomputed(*m, v)).collect();
        aggregate_report(id, scores).unwrap()
    }

    fn echo() -> ConfigEcho {
        ConfigEcho::new(&Config::default(), None)
    }

    #[test]
    fn means_are_unweighted() {
        let r = CorpusReport::from_documents(vec![doc("a", 0.6), doc("b", 0.8), doc("c", 1.0)], vec![], echo());
        let m = r.means.unwrap();
        assert!((m.metrics[&MetricName::Fa] - 0.8).abs() < 1e-12);
        assert!((m.overall - 0.8).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let r = CorpusReport::from_documents(vec![doc("a", 0.123456789), doc("b", 1.0 / 3.0)], vec![], echo());
        let once = emit_report(&r, ReportFormat::Json);
        let parsed = parse_report(&once).unwrap();
        assert_eq!(parsed, r);
        assert_eq!(emit_report(&parsed, ReportFormat::Json), once);
    }

    #[test]
    fn empty_corpus() {
        let r = CorpusReport::from_documents(vec![], vec![], echo());
        let json = emit_report(&r, ReportFormat::Json);
        let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v["documents"].as_array().unwrap().len(), 0);
        assert!(v["means"].is_null());
        assert!(String::from_utf8(emit_report(&r, ReportFormat::Table)).unwrap().contains("0 documents"));
    }

    #[test]
    fn table_row_layout() {
        let row = table_row("x", &[0.5; 9]);
        assert_eq!(row.split_whitespace().count(), 14);
        assert!(row.ends_with("50.0"));
    }
}
