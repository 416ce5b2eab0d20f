//! Plain-text anchor sentences, one per section, for exact-substring
//! recovery checks.
//!
//! A section's text runs from the end of its heading to the next heading.
//! It is split into paragraphs at blank lines and at lines that begin with a
//! command, then into sentences at `.`, `?` or `!` followed by whitespace
//! and an uppercase letter (or the end of the paragraph). The first sentence
//! that is free of commands, math and braces and whose length falls in the
//! configured window becomes the section's anchor. Whitespace runs inside
//! the sentence are collapsed to single spaces.

use serde::{Deserialize, Serialize};

use super::{extract_sections, ParseWarning, WarningKind};
use crate::normalize::collapse_whitespace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorConfig {
    pub min_chars: usize,
    pub max_chars: usize,
}

impl Default for AnchorConfig {
    fn default() -> Self {
        Self {
            min_chars: 40,
            max_chars: 300,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorSentence {
    /// Index into the document's section list.
    pub section_index: usize,
    pub text: String,
}

fn paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('\\') {
            if !cur.is_empty() {
                out.push(collapse_whitespace(&cur.join(" ")));
                cur.clear();
            }
        } else {
            cur.push(t);
        }
    }
    if !cur.is_empty() {
        out.push(collapse_whitespace(&cur.join(" ")));
    }
    out
}

fn sentences(paragraph: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = paragraph.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0;
    for (k, &(i, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '?' | '!') {
            continue;
        }
        let end = i + c.len_utf8();
        let boundary = match (chars.get(k + 1), chars.get(k + 2)) {
            (None, _) => true,
            (Some(&(_, ' ')), Some(&(_, next))) => next.is_uppercase(),
            _ => false,
        };
        if boundary {
            out.push(paragraph[start..end].trim());
            start = end;
        }
    }
    out
}

fn qualifies(sentence: &str, cfg: &AnchorConfig) -> bool {
    let n = sentence.chars().count();
    n >= cfg.min_chars
        && n <= cfg.max_chars
        && !sentence.contains(['\\', '$', '{', '}'])
        && sentence.chars().any(char::is_alphabetic)
}

fn first_qualifying(body: &str, cfg: &AnchorConfig) -> Option<String> {
    paragraphs(body)
        .iter()
        .flat_map(|p| sentences(p).into_iter().map(str::to_string).collect::<Vec<_>>())
        .find(|s| qualifies(s, cfg))
}

/// Anchors for a single page: one per section that starts on the page plus
/// one for any text before the page's first heading, which usually
/// continues a section from an earlier page. Input is comment-stripped.
pub fn page_anchor_sentences(page_src: &str, cfg: &AnchorConfig) -> Vec<String> {
    let lead_end = extract_sections(page_src)
        .items
        .first()
        .map_or(page_src.len(), |h| h.span.start);
    first_qualifying(&page_src[..lead_end], cfg)
        .into_iter()
        .chain(extract_anchor_sentences(page_src, cfg).0.into_iter().map(|a| a.text))
        .collect()
}

/// At most one anchor per section of a comment-stripped source. Sections
/// without a qualifying sentence produce a warning instead.
pub fn extract_anchor_sentences(
    reference_src: &str,
    cfg: &AnchorConfig,
) -> (Vec<AnchorSentence>, Vec<ParseWarning>) {
    let sections = extract_sections(reference_src).items;
    let mut anchors = Vec::new();
    let mut warnings = Vec::new();
    for (idx, heading) in sections.iter().enumerate() {
        let end = sections
            .get(idx + 1)
            .map_or(reference_src.len(), |h| h.span.start);
        let body = &reference_src[heading.span.end..end.max(heading.span.end)];
        match first_qualifying(body, cfg) {
            Some(text) => anchors.push(AnchorSentence {
                section_index: idx,
                text,
            }),
            None => warnings.push(ParseWarning::new(
                WarningKind::NoAnchorSentence,
                heading.span.start,
                format!("no qualifying sentence in section {:?}", heading.title_normalized),
            )),
        }
    }
    (anchors, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchors(src: &str) -> Vec<String> {
        extract_anchor_sentences(src, &AnchorConfig::default())
            .0
            .into_iter()
            .map(|a| a.text)
            .collect()
    }

    #[test]
    fn first_qualifying_sentence() {
        let src = "\\section{Intro}\nWe study page-level reconstruction of scientific documents. Then more follows here for sure.\n";
        assert_eq!(
            anchors(src),
            vec!["We study page-level reconstruction of scientific documents."]
        );
    }

    #[test]
    fn command_bearing_sentence_skipped() {
        let src = "\\section{Related}\nPrior systems were evaluated by \\cite{a} on many benchmarks. Plain sentences without any markup are preferred here.\n";
        assert_eq!(
            anchors(src),
            vec!["Plain sentences without any markup are preferred here."]
        );
    }

    #[test]
    fn page_anchors_include_lead_text() {
        let src = "continued from the previous page with a long enough sentence.\n\\section{Next}\nThe next section opens with this plain sentence here.\n";
        assert_eq!(
            page_anchor_sentences(src, &AnchorConfig::default()),
            vec![
                "continued from the previous page with a long enough sentence.",
                "The next section opens with this plain sentence here."
            ]
        );
    }

    #[test]
    fn pure_math_section_has_no_anchor() {
        let src = "\\section{Math}\n\\begin{equation}a=b\\end{equation}\n$x$\n";
        let (a, w) = extract_anchor_sentences(src, &AnchorConfig::default());
        assert!(a.is_empty());
        assert_eq!(w[0].kind, WarningKind::NoAnchorSentence);
    }

    #[test]
    fn lowercase_after_period_is_not_a_boundary() {
        let src = "\\section{S}\nThis works well, e.g. for long documents with many pages in them. Next one.\n";
        assert_eq!(
            anchors(src),
            vec!["This works well, e.g. for long documents with many pages in them."]
        );
    }

    #[test]
    fn wrapped_lines_collapse() {
        let src = "\\section{S}\nA sentence that is wrapped\n   across two source lines in the file.\n";
        assert_eq!(
            anchors(src),
            vec!["A sentence that is wrapped across two source lines in the file."]
        );
    }

    #[test]
    fn one_anchor_per_section_and_length_window() {
        let src = "\\section{A}\nToo short.\n\\subsection{B}\nThis second section has a sentence that is long enough.\n";
        let (a, w) = extract_anchor_sentences(src, &AnchorConfig::default());
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].section_index, 1);
        assert_eq!(w.len(), 1);
    }
}
