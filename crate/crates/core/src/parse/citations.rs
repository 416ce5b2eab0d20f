use std::ops::Range;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::scan::{braced_arg, is_escaped, skip_optional_arg};
use super::{Extracted, ParseWarning, Spanned, WarningKind};

static CITE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\\([A-Za-z]*cite[A-Za-z]*)\*?").expect("cite regex"));

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiteCommand {
    Cite,
    Citep,
    Citet,
    Other(String),
}

impl CiteCommand {
    fn from_name(name: &str) -> Self {
        match name {
            "cite" => CiteCommand::Cite,
            "citep" => CiteCommand::Citep,
            "citet" => CiteCommand::Citet,
            other => CiteCommand::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationCommand {
    pub command: CiteCommand,
    pub keys: Vec<String>,
    pub span: Range<usize>,
}

impl Spanned for CitationCommand {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

/// Citation commands and their comma-separated keys. Commands whose key
/// list is empty are dropped with a warning.
pub fn extract_citations(src: &str) -> Extracted<CitationCommand> {
    let mut out = Extracted::default();
    for caps in CITE.captures_iter(src) {
        let whole = caps.get(0).expect("match");
        if is_escaped(src, whole.start()) {
            continue;
        }
        // natbib allows up to two optional arguments (pre- and post-note).
        let after = skip_optional_arg(src, skip_optional_arg(src, whole.end()));
        match braced_arg(src, after) {
            Ok(Some(arg)) => {
                let keys: Vec<String> = src[arg.inner.clone()]
                    .split(',')
                    .map(str::trim)
                    .filter(|k| !k.is_empty())
                    .map(str::to_string)
                    .collect();
                if keys.is_empty() {
                    out.warnings.push(ParseWarning::new(
                        WarningKind::EmptyCitation,
                        whole.start(),
                        format!("\\{} with no keys", &caps[1]),
                    ));
                    continue;
                }
                out.items.push(CitationCommand {
                    command: CiteCommand::from_name(&caps[1]),
                    keys,
                    span: whole.start()..arg.outer.end,
                });
            }
            Ok(None) => out.warnings.push(ParseWarning::new(
                WarningKind::MissingArgument,
                whole.start(),
                format!("\\{} without a key argument", &caps[1]),
            )),
            Err(open) => out.warnings.push(ParseWarning::new(
                WarningKind::UnbalancedBrace,
                open,
                format!("unbalanced brace in \\{}", &caps[1]),
            )),
        }
    }
    out
}
