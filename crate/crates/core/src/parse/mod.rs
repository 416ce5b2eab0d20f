//! Lightweight, error-tolerant LaTeX extractors.
//!
//! Nothing in here is a TeX engine. Commands are found with regular
//! expressions, environments with a begin/end token stack, and every
//! extractor keeps going after malformed input, recording a
//! [`ParseWarning`] instead of failing. Judging the quality of the input is
//! the metrics' job, not the parser's.
//!
//! All extractors except [`extract_bib_entries`] expect comment-stripped
//! input (see [`strip_comments`]). [`StructuralIndex`] runs the whole set.

mod anchors;
mod bib;
mod citations;
mod comments;
mod index;
mod math;
mod refs;
pub(crate) mod scan;
mod sections;
mod tables;

use std::ops::Range;

use serde::{Deserialize, Serialize};

pub use anchors::{extract_anchor_sentences, page_anchor_sentences, AnchorConfig, AnchorSentence};
pub use bib::{excise_bib_entries, extract_bib_entries, BibEntry};
pub use citations::{extract_citations, CitationCommand, CiteCommand};
pub use comments::strip_comments;
pub use index::StructuralIndex;
pub use math::{extract_math_blocks, MathBlock, MathKind};
pub use refs::{extract_refs_and_labels, LabelDef, LabelKind, RefCommand};
pub use sections::{extract_sections, normalize_title, SectionHeading, SectionLevel};
pub use tables::{extract_tables, TableBlock};

/// One page of model output or reference LaTeX.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPage {
    pub doc_id: String,
    pub page_index: usize,
    pub text: String,
}

impl RawPage {
    pub fn new(doc_id: impl Into<String>, page_index: usize, text: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            page_index,
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    UnbalancedBrace,
    MissingArgument,
    EmptyCitation,
    UnclosedEnvironment,
    UnbalancedBibEntry,
    EmptyBibKey,
    NoAnchorSentence,
}

/// A recoverable problem found while scanning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub kind: WarningKind,
    pub offset: usize,
    pub message: String,
}

impl ParseWarning {
    pub(crate) fn new(kind: WarningKind, offset: usize, message: impl Into<String>) -> Self {
        Self {
            kind,
            offset,
            message: message.into(),
        }
    }
}

/// Items produced by an extractor together with the warnings it raised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extracted<T> {
    pub items: Vec<T>,
    pub warnings: Vec<ParseWarning>,
}

impl<T> Default for Extracted<T> {
    fn default() -> Self {
        Self {
            items: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

impl<T> Extracted<T> {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Anything with a byte span in the source it was extracted from.
pub trait Spanned {
    fn span(&self) -> Range<usize>;

    fn offset(&self) -> usize {
        self.span().start
    }
}
