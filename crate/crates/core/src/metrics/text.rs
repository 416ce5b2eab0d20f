//! Character-level metrics: anchor-sentence recovery and document
//! similarity.

use serde::{Deserialize, Serialize};

use super::{MetricDetails, MetricName, MetricScore};
use crate::normalize::{collapse_whitespace, levenshtein};
use crate::parse::{excise_bib_entries, extract_bib_entries, AnchorSentence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorCheck {
    /// Section the anchor came from, when known.
    pub section_index: Option<usize>,
    pub text: String,
    pub found: bool,
}

/// Fraction of reference anchor sentences found verbatim in the generated
/// text. Matching is case- and punctuation-sensitive; only whitespace runs
/// are collapsed on the generated side, since anchors are stored collapsed.
pub fn score_ctp(anchors: &[AnchorSentence], gen_text: &str) -> MetricScore {
    ctp(anchors.iter().map(|a| (Some(a.section_index), a.text.as_str())), gen_text)
}

/// [`score_ctp`] over bare anchor strings.
pub fn score_ctp_texts(anchors: &[String], gen_text: &str) -> MetricScore {
    ctp(anchors.iter().map(|a| (None, a.as_str())), gen_text)
}

fn ctp<'a>(anchors: impl Iterator<Item = (Option<usize>, &'a str)>, gen_text: &str) -> MetricScore {
    let haystack = collapse_whitespace(gen_text);
    let anchors = anchors
        .map(|(section_index, text)| AnchorCheck {
            section_index,
            text: text.to_string(),
            found: haystack.contains(collapse_whitespace(text).as_str()),
        })
        .collect();
    MetricScore::from_details(MetricName::Ctp, MetricDetails::Ctp { anchors })
}

fn truncate_chars(s: &str, cap: Option<usize>) -> &str {
    match cap.and_then(|c| s.char_indices().nth(c)) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

/// Normalized Levenshtein similarity of the merged documents after BibTeX
/// entries are cut from both sides.
pub fn score_ds(ref_merged: &str, gen_merged: &str, length_cap: Option<usize>) -> MetricScore {
    let bib_entries_removed = extract_bib_entries(gen_merged).items.len();
    let reference = excise_bib_entries(ref_merged);
    let generated = excise_bib_entries(gen_merged);
    let reference = truncate_chars(&reference, length_cap);
    let generated = truncate_chars(&generated, length_cap);
    let details = MetricDetails::Ds {
        reference_chars: reference.chars().count(),
        generated_chars: generated.chars().count(),
        distance: levenshtein(reference, generated),
        bib_entries_removed,
        length_cap,
    };
    MetricScore::from_details(MetricName::Ds, details)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn anchor(i: usize, s: &str) -> AnchorSentence {
        AnchorSentence {
            section_index: i,
            text: s.to_string(),
        }
    }

    #[test]
    fn ctp_counts_exact_hits() {
        let a = [
            anchor(0, "The first anchor sentence is right here."),
            anchor(1, "The second anchor sentence is also here."),
        ];
        let gen = "The first anchor sentence\n is right here. The second anchor sentence is als0 here.";
        let s = score_ctp(&a, gen);
        assert_eq!(s.value, 0.5);
        let lower = score_ctp(&a[..1], "the first anchor sentence is right here.");
        assert_eq!(lower.value, 0.0);
    }

    #[test]
    fn ctp_vacuous() {
        let s = score_ctp(&[], "anything");
        assert_eq!(s.value, 1.0);
        assert!(s.is_vacuous());
    }

    #[test]
    fn ds_identity_and_bib() {
        let r = "\\section{A}\nSome body.";
        assert_eq!(score_ds(r, r, None).value, 1.0);
        let g = format!("{r}\n\n@article{{k, title={{T}}}}\n");
        let s = score_ds(r, &g, None);
        assert_eq!(s.value, 1.0);
        assert!(matches!(s.details, MetricDetails::Ds { bib_entries_removed: 1, .. }));
        assert_eq!(score_ds(r, "", None).value, 0.0);
    }

    #[test]
    fn ds_kitten() {
        let s = score_ds("kitten", "sitting", None);
        assert!((s.value - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }
}
