use std::ops::Range;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::scan::{braced_arg, is_escaped, skip_optional_arg};
use super::{Extracted, ParseWarning, Spanned, WarningKind};

static HEADING: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\\((?:sub){0,2})section(\*?)").expect("heading regex"));

// A leading "3.2", "1." or "4)" token followed by whitespace.
static NUMERIC_PREFIX: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[0-9]+(?:\.[0-9]+)*[.)]?\s+").expect("prefix regex"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionLevel {
    Section,
    Subsection,
    Subsubsection,
}

impl SectionLevel {
    pub fn command(self) -> &'static str {
        match self {
            SectionLevel::Section => "section",
            SectionLevel::Subsection => "subsection",
            SectionLevel::Subsubsection => "subsubsection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionHeading {
    pub level: SectionLevel,
    pub title_raw: String,
    pub title_normalized: String,
    pub starred: bool,
    pub span: Range<usize>,
}

impl Spanned for SectionHeading {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

/// Collapse whitespace and drop a leading numeric prefix such as `3.2`.
pub fn normalize_title(raw: &str) -> String {
    let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    match NUMERIC_PREFIX.find(&collapsed) {
        Some(m) => collapsed[m.end()..].to_string(),
        None => collapsed,
    }
}

/// Every `\section`, `\subsection` and `\subsubsection` (starred or not),
/// in document order.
pub fn extract_sections(src: &str) -> Extracted<SectionHeading> {
    let mut out = Extracted::default();
    for caps in HEADING.captures_iter(src) {
        let whole = caps.get(0).expect("match");
        if is_escaped(src, whole.start()) {
            continue;
        }
        // `\sectionmark`, `\subsectionfont`, ...
        if src[whole.end()..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic())
        {
            continue;
        }
        let level = match caps[1].len() {
            0 => SectionLevel::Section,
            3 => SectionLevel::Subsection,
            _ => SectionLevel::Subsubsection,
        };
        let starred = !caps[2].is_empty();
        let after = skip_optional_arg(src, whole.end());
        match braced_arg(src, after) {
            Ok(Some(arg)) => {
                let title_raw = src[arg.inner.clone()].to_string();
                out.items.push(SectionHeading {
                    level,
                    title_normalized: normalize_title(&title_raw),
                    title_raw,
                    starred,
                    span: whole.start()..arg.outer.end,
                });
            }
            Ok(None) => out.warnings.push(ParseWarning::new(
                WarningKind::MissingArgument,
                whole.start(),
                format!("\\{} without a title argument", level.command()),
            )),
            Err(open) => out.warnings.push(ParseWarning::new(
                WarningKind::UnbalancedBrace,
                open,
                format!("unbalanced brace in \\{} title", level.command()),
            )),
        }
    }
    out
}
