use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::scan::{is_escaped, matching_brace};
use super::{Extracted, ParseWarning, Spanned, WarningKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibEntry {
    /// Lower-cased entry type (`article`, `inproceedings`, ...).
    pub entry_type: String,
    pub key: String,
    /// The entry text from `@` through the closing brace.
    pub body_raw: String,
    pub span: Range<usize>,
}

impl Spanned for BibEntry {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

const NON_ENTRIES: &[&str] = &["comment", "string", "preamble"];

/// BibTeX entries embedded anywhere in the text. Entries whose braces never
/// balance or whose key is empty are skipped with a warning.
pub fn extract_bib_entries(src: &str) -> Extracted<BibEntry> {
    let mut out = Extracted::default();
    let bytes = src.as_bytes();
    let mut i = 0;
    while let Some(off) = src[i..].find('@') {
        let at = i + off;
        i = at + 1;
        if is_escaped(src, at) {
            continue;
        }
        let mut p = at + 1;
        while p < bytes.len() && bytes[p].is_ascii_alphabetic() {
            p += 1;
        }
        if p == at + 1 {
            continue;
        }
        let entry_type = src[at + 1..p].to_ascii_lowercase();
        while p < bytes.len() && bytes[p].is_ascii_whitespace() {
            p += 1;
        }
        if bytes.get(p) != Some(&b'{') {
            continue;
        }
        let Some(close) = matching_brace(src, p) else {
            out.warnings.push(ParseWarning::new(
                WarningKind::UnbalancedBibEntry,
                at,
                format!("@{entry_type} entry with unbalanced braces"),
            ));
            continue;
        };
        if NON_ENTRIES.contains(&entry_type.as_str()) {
            i = close + 1;
            continue;
        }
        let inner = &src[p + 1..close];
        let key = inner.split(',').next().unwrap_or("").trim();
        if key.is_empty() || key.contains(|c: char| c.is_whitespace() || c == '{' || c == '}') {
            out.warnings.push(ParseWarning::new(
                WarningKind::EmptyBibKey,
                at,
                format!("@{entry_type} entry without a usable key"),
            ));
            i = close + 1;
            continue;
        }
        out.items.push(BibEntry {
            entry_type,
            key: key.to_string(),
            body_raw: src[at..=close].to_string(),
            span: at..close + 1,
        });
        i = close + 1;
    }
    out
}

/// Remove every BibTeX entry (and the whitespace that trails it), then trim
/// trailing whitespace from the result.
pub fn excise_bib_entries(src: &str) -> String {
    let entries = extract_bib_entries(src).items;
    let mut out = String::with_capacity(src.len());
    let mut last = 0;
    for e in &entries {
        out.push_str(&src[last..e.span.start]);
        let rest = &src[e.span.end..];
        last = e.span.end + (rest.len() - rest.trim_start().len());
    }
    out.push_str(&src[last..]);
    out.truncate(out.trim_end().len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry() {
        let ex = extract_bib_entries("@article{Smith_2020, title={X}}");
        assert_eq!(ex.items.len(), 1);
        assert_eq!(ex.items[0].key, "Smith_2020");
        assert_eq!(ex.items[0].entry_type, "article");
        assert!(ex.items[0].body_raw.starts_with('@'));
    }

    #[test]
    fn no_entries() {
        assert!(extract_bib_entries("plain body text, mail me at a@b.org").is_empty());
    }

    #[test]
    fn back_to_back() {
        let ex = extract_bib_entries("@book{a, t={1}}@InProceedings{b,\n t = {2}}");
        let keys: Vec<_> = ex.items.iter().map(|e| e.key.as_str()).collect();
        assert_eq!(keys, vec!["a", "b"]);
        assert_eq!(ex.items[1].entry_type, "inproceedings");
    }

    #[test]
    fn unbalanced_skipped() {
        let ex = extract_bib_entries("@article{bad, title={X}\n@misc{good, note={y}}");
        // `bad` swallows `good` in brace counting, so nothing balances.
        assert!(ex.items.iter().all(|e| e.key != "bad"));
        assert!(ex.warnings.iter().any(|w| w.kind == WarningKind::UnbalancedBibEntry));
        assert_eq!(ex.items.len(), 1);
        assert_eq!(ex.items[0].key, "good");
    }

    #[test]
    fn empty_key_and_string_macros() {
        let ex = extract_bib_entries("@misc{, title={x}} @string{foo = {bar}}");
        assert!(ex.items.is_empty());
        assert_eq!(ex.warnings.len(), 1);
    }

    #[test]
    fn excision() {
        let body = "Body text.";
        let with_bib = format!("{body}\n\n@article{{k, title={{T}}}}\n@misc{{j, note={{n}}}}\n");
        assert_eq!(excise_bib_entries(&with_bib), body);
        assert_eq!(excise_bib_entries("a @misc{k,x={1}} b"), "a b");
    }
}
