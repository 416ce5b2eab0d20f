//! Page merging and compilable project assembly.
//!
//! [`merge_pages`] concatenates page outputs in page order with a blank
//! line between pages. [`build_project`] turns a merged document into a
//! standalone LaTeX project (preamble, body, BibTeX file, placeholder
//! graphics) and [`wrap_snippet_minimal`] does the same for one page, with
//! a shim that makes dangling cross-page references harmless.

mod preamble;
mod project;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::parse::RawPage;

pub use preamble::{Preamble, PreambleError, PREAMBLE_VERSION};
pub use project::{
    build_project, build_project_with, wrap_snippet_minimal, wrap_snippet_with, AssembledProject,
    PLACEHOLDER_NAME, PLACEHOLDER_PDF,
};

/// Separator placed between consecutive pages in the merged text.
pub const PAGE_SEPARATOR: &str = "\n\n";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssemblyError {
    #[error("no pages to merge")]
    NoPages,
    #[error("page index {page_index} appears more than once in {doc_id:?}")]
    DuplicatePage { doc_id: String, page_index: usize },
    #[error("pages from different documents: {0:?} and {1:?}")]
    MixedDocuments(String, String),
}

/// One document as an ordered list of pages plus their concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSource {
    pub doc_id: String,
    pub pages: Vec<RawPage>,
    pub merged: String,
    /// Byte range of each page inside `merged`.
    pub boundaries: Vec<Range<usize>>,
}

impl DocumentSource {
    /// A single unsegmented text treated as one page.
    pub fn from_text(doc_id: impl Into<String>, text: impl Into<String>) -> Self {
        let doc_id = doc_id.into();
        merge_pages(vec![RawPage::new(doc_id, 0, text)]).expect("one page")
    }

    pub fn page_text(&self, i: usize) -> &str {
        &self.merged[self.boundaries[i].clone()]
    }

    /// Cut `merged` at the recorded boundaries.
    pub fn split(&self) -> Vec<&str> {
        (0..self.boundaries.len()).map(|i| self.page_text(i)).collect()
    }
}

/// Sort pages by index and join them with [`PAGE_SEPARATOR`].
pub fn merge_pages(mut pages: Vec<RawPage>) -> Result<DocumentSource, AssemblyError> {
    let first = pages.first().ok_or(AssemblyError::NoPages)?;
    let doc_id = first.doc_id.clone();
    if let Some(other) = pages.iter().find(|p| p.doc_id != doc_id) {
        return Err(AssemblyError::MixedDocuments(doc_id, other.doc_id.clone()));
    }
    pages.sort_by_key(|p| p.page_index);
    if let Some(w) = pages.windows(2).find(|w| w[0].page_index == w[1].page_index) {
        return Err(AssemblyError::DuplicatePage {
            doc_id,
            page_index: w[0].page_index,
        });
    }
    let mut merged = String::new();
    let mut boundaries = Vec::with_capacity(pages.len());
    for (i, p) in pages.iter().enumerate() {
        if i > 0 {
            merged.push_str(PAGE_SEPARATOR);
        }
        let start = merged.len();
        merged.push_str(&p.text);
        boundaries.push(start..merged.len());
    }
    Ok(DocumentSource {
        doc_id,
        pages,
        merged,
        boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pages(texts: &[(usize, &str)]) -> Vec<RawPage> {
        texts.iter().map(|&(i, t)| RawPage::new("d", i, t)).collect()
    }

    #[test]
    fn two_pages() {
        let d = merge_pages(pages(&[(0, "A"), (1, "B")])).unwrap();
        assert_eq!(d.merged, "A\n\nB");
    }

    #[test]
    fn single_page() {
        let d = merge_pages(pages(&[(0, "only")])).unwrap();
        assert_eq!(d.merged, "only");
    }

    #[test]
    fn resorts() {
        let d = merge_pages(pages(&[(1, "second"), (0, "first")])).unwrap();
        assert_eq!(d.merged, "first\n\nsecond");
        assert_eq!(d.pages[0].page_index, 0);
    }

    #[test]
    fn errors() {
        assert_eq!(merge_pages(vec![]), Err(AssemblyError::NoPages));
        assert!(matches!(
            merge_pages(pages(&[(0, "a"), (0, "b")])),
            Err(AssemblyError::DuplicatePage { page_index: 0, .. })
        ));
        let mixed = vec![RawPage::new("a", 0, ""), RawPage::new("b", 1, "")];
        assert!(matches!(merge_pages(mixed), Err(AssemblyError::MixedDocuments(..))));
    }

    proptest! {
        #[test]
        fn split_then_merge_is_identity(texts in prop::collection::vec(".{0,20}", 1..6)) {
            let ps: Vec<RawPage> = texts.iter().enumerate().map(|(i, t)| RawPage::new("d", i, t.clone())).collect();
            let d = merge_pages(ps).unwrap();
            let split = d.split();
            prop_assert_eq!(&split, &texts.iter().map(String::as_str).collect::<Vec<_>>());
            prop_assert_eq!(split.join(PAGE_SEPARATOR), d.merged.clone());
        }
    }
}
