use serde::{Deserialize, Serialize};

use super::*;
use crate::assembly::{DocumentSource, PAGE_SEPARATOR};
use crate::compile::CompileResult;
use crate::parse::StructuralIndex;

/// A merged document and its structural index, built once and reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedDocument {
    pub source: DocumentSource,
    pub index: StructuralIndex,
}

impl ParsedDocument {
    pub fn new(source: DocumentSource, cfg: &MetricConfig) -> Self {
        let index = StructuralIndex::build_paged(&source.pages, PAGE_SEPARATOR, &cfg.anchor);
        Self { source, index }
    }
}

/// The eight metrics that need no compiler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextScores {
    pub ctp: MetricScore,
    pub fa: MetricScore,
    pub ta: MetricScore,
    pub sa: MetricScore,
    pub cc: MetricScore,
    pub rv: MetricScore,
    pub ds: MetricScore,
    pub baseline: MetricScore,
}

impl TextScores {
    pub fn get(&self, name: MetricName) -> Option<&MetricScore> {
        match name {
            MetricName::Ctp => Some(&self.ctp),
            MetricName::Fa => Some(&self.fa),
            MetricName::Ta => Some(&self.ta),
            MetricName::Sa => Some(&self.sa),
            MetricName::Cc => Some(&self.cc),
            MetricName::Rv => Some(&self.rv),
            MetricName::Ds => Some(&self.ds),
            MetricName::Baseline => Some(&self.baseline),
            MetricName::Csr => None,
        }
    }

    /// Combine with a CSR score into a full report.
    pub fn into_report(self, doc_id: impl Into<String>, csr: MetricScore) -> Result<DocumentReport, MetricError> {
        aggregate_report(
            doc_id,
            vec![
                self.sa, self.cc, self.rv, self.ds, self.baseline, csr, self.ctp, self.fa, self.ta,
            ],
        )
    }
}

pub fn evaluate_text_metrics(
    reference: &ParsedDocument,
    generated: &ParsedDocument,
    cfg: &MetricConfig,
) -> Result<TextScores, MetricError> {
    cfg.validate()?;
    let (r, g) = (&reference.index, &generated.index);
    Ok(TextScores {
        ctp: score_ctp(&r.anchors, &generated.source.merged),
        fa: score_fa(&r.math, &g.math, cfg),
        ta: score_ta(&r.tables, &g.tables, cfg),
        sa: score_sa(&r.sections, &g.sections),
        cc: score_cc(&r.citations, &g.citations, &g.bib),
        rv: score_rv(&r.labels, &r.refs, &g.refs),
        ds: score_ds(&reference.source.merged, &generated.source.merged, cfg.ds_length_cap),
        baseline: score_baseline(&generated.source.pages, cfg)?,
    })
}

/// CSR for one document: 1.0 when its assembled project compiled.
pub fn score_csr(result: &CompileResult) -> MetricScore {
    MetricScore::from_details(
        MetricName::Csr,
        MetricDetails::Csr {
            success: result.success,
            engine: result.engine.clone(),
            timed_out: result.timed_out,
            duration_secs: result.duration_secs,
            log_excerpt: result.log_excerpt.clone(),
        },
    )
}
