use serde::{Deserialize, Serialize};

use super::*;

/// Everything the metrics need from one document, extracted once.
///
/// Offsets refer to the comment-stripped text. For page-segmented input the
/// stripped pages are joined with the same separator as the raw merge, so
/// table spans (extracted per page to keep their page index) share the
/// coordinate system of the other element lists.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StructuralIndex {
    pub sections: Vec<SectionHeading>,
    pub citations: Vec<CitationCommand>,
    pub refs: Vec<RefCommand>,
    pub labels: Vec<LabelDef>,
    pub math: Vec<MathBlock>,
    pub tables: Vec<TableBlock>,
    pub bib: Vec<BibEntry>,
    pub anchors: Vec<AnchorSentence>,
    pub warnings: Vec<ParseWarning>,
}

impl StructuralIndex {
    /// Index an unsegmented source. Tables carry no page index.
    pub fn build(src: &str, cfg: &AnchorConfig) -> Self {
        let stripped = strip_comments(src);
        let mut index = Self::from_stripped(&stripped, cfg);
        let tables = extract_tables(&stripped, None);
        index.warnings.extend(tables.warnings);
        index.tables = tables.items;
        index.sort_warnings();
        index
    }

    /// Index a page-segmented document. `separator` must be the string used
    /// to merge the pages.
    pub fn build_paged(pages: &[RawPage], separator: &str, cfg: &AnchorConfig) -> Self {
        let stripped: Vec<String> = pages.iter().map(|p| strip_comments(&p.text)).collect();
        let merged = stripped.join(separator);
        let mut index = Self::from_stripped(&merged, cfg);
        let mut start = 0;
        for (page, text) in pages.iter().zip(&stripped) {
            let ex = extract_tables(text, Some(page.page_index));
            index.warnings.extend(ex.warnings.into_iter().map(|mut w| {
                w.offset += start;
                w
            }));
            index.tables.extend(ex.items.into_iter().map(|mut t| {
                t.span = t.span.start + start..t.span.end + start;
                t
            }));
            start += text.len() + separator.len();
        }
        index.sort_warnings();
        index
    }

    fn from_stripped(src: &str, cfg: &AnchorConfig) -> Self {
        let sections = extract_sections(src);
        let citations = extract_citations(src);
        let (refs, labels) = extract_refs_and_labels(src);
        let math = extract_math_blocks(src);
        let bib = extract_bib_entries(src);
        let (anchors, anchor_warnings) = extract_anchor_sentences(src, cfg);

        let mut warnings = Vec::new();
        warnings.extend(sections.warnings);
        warnings.extend(citations.warnings);
        warnings.extend(refs.warnings);
        warnings.extend(labels.warnings);
        warnings.extend(math.warnings);
        warnings.extend(bib.warnings);
        warnings.extend(anchor_warnings);

        Self {
            sections: sections.items,
            citations: citations.items,
            refs: refs.items,
            labels: labels.items,
            math: math.items,
            tables: Vec::new(),
            bib: bib.items,
            anchors,
            warnings,
        }
    }

    fn sort_warnings(&mut self) {
        self.warnings.sort_by_key(|w| w.offset);
    }

    /// Every citation key occurrence, in order.
    pub fn citation_keys(&self) -> impl Iterator<Item = &str> {
        self.citations
            .iter()
            .flat_map(|c| c.keys.iter().map(String::as_str))
    }

    /// Labels of figures and tables.
    pub fn float_labels(&self) -> impl Iterator<Item = &LabelDef> {
        self.labels
            .iter()
            .filter(|l| matches!(l.kind, LabelKind::Figure | LabelKind::Table))
    }
}
