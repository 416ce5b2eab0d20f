//! Scoring for LaTeX reconstructed page by page from rendered documents.
//!
//! A generated document is compared with its reference source on nine
//! metrics in three groups: structural faithfulness (SA, CC, RV), end-to-end
//! usability (DS, Baseline, CSR) and transcription fidelity (CTP, FA, TA).
//! The same checks cut down to a single page become binary unit tests whose
//! pass fraction serves as a reward.
//!
//! - [`parse`] builds a [`parse::StructuralIndex`] from raw source.
//! - [`metrics`] scores a generated document against a reference.
//! - [`assembly`] and [`compile`] turn pages into a project and run LaTeX.
//! - [`reward`] instantiates and runs the page-level unit tests.
//! - [`corpus`], [`report`] and [`config`] handle input, output and settings.
//!
//! ```
//! use texrecon::assembly::DocumentSource;
//! use texrecon::metrics::{evaluate_text_metrics, MetricConfig, ParsedDocument};
//!
//! let cfg = MetricConfig::default();
//! let src = "\\section{Intro}\nThis sentence is long enough to serve as an anchor.\n";
//! let doc = ParsedDocument::new(DocumentSource::from_text("d", src), &cfg);
//! let scores = evaluate_text_metrics(&doc, &doc, &cfg).unwrap();
//! assert_eq!(scores.ctp.value, 1.0);
//! assert_eq!(scores.ds.value, 1.0);
//! ```

pub mod assembly;
pub mod compile;
pub mod config;
pub mod corpus;
pub mod metrics;
pub mod normalize;
pub mod parse;
pub mod report;
pub mod reward;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/documents.md")]
    mod documents {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/sanity.md")]
    mod sanity {}
    #[doc = include_str!("../../../book/src/compiling.md")]
    mod compiling {}
    #[doc = include_str!("../../../book/src/rewards.md")]
    mod rewards {}
    #[doc = include_str!("../../../book/src/configuration.md")]
    mod configuration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
