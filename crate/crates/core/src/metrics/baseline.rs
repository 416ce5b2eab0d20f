//! Page sanity checks.
//!
//! A page is valid when it is non-empty, has at least one alphanumeric
//! character, contains no CJK characters or emoji, and does not end in a
//! degenerate repetition of a character n-gram.

use serde::{Deserialize, Serialize};

use super::{MetricConfig, MetricDetails, MetricError, MetricName, MetricScore};
use crate::parse::RawPage;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum SanityFailure {
    Empty,
    NoAlphanumeric,
    Cjk { ch: char },
    Emoji { ch: char },
    TrailingRepetition { n: usize, repeats: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageCheck {
    pub page_index: usize,
    pub failures: Vec<SanityFailure>,
}

impl PageCheck {
    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }
}

fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x4E00..=0x9FFF      // unified ideographs
        | 0x3400..=0x4DBF    // extension A
        | 0x20000..=0x2FA1F  // extensions B onward and compatibility supplement
        | 0xF900..=0xFAFF    // compatibility ideographs
        | 0x3040..=0x309F    // hiragana
        | 0x30A0..=0x30FF    // katakana
        | 0x31F0..=0x31FF    // katakana phonetic extensions
        | 0x1100..=0x11FF    // hangul jamo
        | 0x3130..=0x318F    // hangul compatibility jamo
        | 0xAC00..=0xD7AF    // hangul syllables
    )
}

fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F300..=0x1F5FF    // symbols and pictographs
        | 0x1F600..=0x1F64F  // emoticons
        | 0x1F680..=0x1F6FF  // transport and map
        | 0x1F900..=0x1F9FF  // supplemental symbols and pictographs
        | 0x1FA70..=0x1FAFF  // symbols and pictographs extended-A
    )
}

/// Smallest `n <= max_n` whose final character n-gram repeats at least
/// `min_repeats` times back to back at the end of `text` (trailing
/// whitespace ignored), with the number of repeats.
pub fn trailing_repetition(text: &str, max_n: usize, min_repeats: usize) -> Option<(usize, usize)> {
    let chars: Vec<char> = text.trim_end().chars().collect();
    let len = chars.len();
    for n in 1..=max_n.min(len / min_repeats.max(1)) {
        let gram = &chars[len - n..];
        let mut repeats = 1;
        while repeats * n + n <= len {
            let start = len - (repeats + 1) * n;
            if &chars[start..start + n] != gram {
                break;
            }
            repeats += 1;
        }
        if repeats >= min_repeats {
            return Some((n, repeats));
        }
    }
    None
}

pub fn page_sanity(page: &RawPage, cfg: &MetricConfig) -> PageCheck {
    let text = &page.text;
    let mut failures = Vec::new();
    if text.is_empty() {
        failures.push(SanityFailure::Empty);
    } else if !text.chars().any(char::is_alphanumeric) {
        failures.push(SanityFailure::NoAlphanumeric);
    }
    if let Some(ch) = text.chars().find(|&c| is_cjk(c)) {
        failures.push(SanityFailure::Cjk { ch });
    }
    if let Some(ch) = text.chars().find(|&c| is_emoji(c)) {
        failures.push(SanityFailure::Emoji { ch });
    }
    if let Some((n, repeats)) =
        trailing_repetition(text, cfg.repetition_max_n, cfg.repetition_min_repeats)
    {
        failures.push(SanityFailure::TrailingRepetition { n, repeats });
    }
    PageCheck {
        page_index: page.page_index,
        failures,
    }
}

/// Fraction of pages passing every sanity check.
pub fn score_baseline(pages: &[RawPage], cfg: &MetricConfig) -> Result<MetricScore, MetricError> {
    if pages.is_empty() {
        return Err(MetricError::EmptyDocument);
    }
    let details = MetricDetails::Baseline {
        pages: pages.iter().map(|p| page_sanity(p, cfg)).collect(),
        repetition_max_n: cfg.repetition_max_n,
        repetition_min_repeats: cfg.repetition_min_repeats,
    };
    Ok(MetricScore::from_details(MetricName::Baseline, details))
}
