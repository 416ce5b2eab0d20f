use std::ops::Range;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::scan::{all_envs, braced_arg, is_escaped};
use super::{Extracted, ParseWarning, Spanned, WarningKind};

static REF_OR_LABEL: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\\(eqref|ref|label)\*?").expect("ref regex"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefCommand {
    pub key: String,
    pub span: Range<usize>,
}

impl Spanned for RefCommand {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Figure,
    Table,
    Equation,
    Other,
}

impl LabelKind {
    /// Kind implied by the key prefix alone, if any.
    pub fn from_key(key: &str) -> Option<Self> {
        if key.starts_with("fig:") {
            Some(LabelKind::Figure)
        } else if key.starts_with("tab:") {
            Some(LabelKind::Table)
        } else if key.starts_with("eq:") {
            Some(LabelKind::Equation)
        } else {
            None
        }
    }

    fn from_env(name: &str) -> Option<Self> {
        match name.trim_end_matches('*') {
            "figure" | "wrapfigure" | "subfigure" => Some(LabelKind::Figure),
            "table" | "wraptable" | "subtable" => Some(LabelKind::Table),
            "equation" | "eqnarray" | "align" | "gather" | "multline" => {
                Some(LabelKind::Equation)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDef {
    pub key: String,
    pub kind: LabelKind,
    pub span: Range<usize>,
}

impl Spanned for LabelDef {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

/// `\ref`/`\eqref` uses and `\label` definitions. Label kind comes from the
/// key prefix (`fig:`, `tab:`, `eq:`); without one, from the innermost
/// enclosing float or equation environment.
pub fn extract_refs_and_labels(src: &str) -> (Extracted<RefCommand>, Extracted<LabelDef>) {
    let mut refs = Extracted::default();
    let mut labels = Extracted::default();
    let mut envs = None;

    for caps in REF_OR_LABEL.captures_iter(src) {
        let whole = caps.get(0).expect("match");
        if is_escaped(src, whole.start())
            || src[whole.end()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic())
        {
            continue;
        }
        let is_label = &caps[1] == "label";
        let sink = if is_label {
            &mut labels.warnings
        } else {
            &mut refs.warnings
        };
        let arg = match braced_arg(src, whole.end()) {
            Ok(Some(arg)) => arg,
            Ok(None) => {
                sink.push(ParseWarning::new(
                    WarningKind::MissingArgument,
                    whole.start(),
                    format!("\\{} without a key", &caps[1]),
                ));
                continue;
            }
            Err(open) => {
                sink.push(ParseWarning::new(
                    WarningKind::UnbalancedBrace,
                    open,
                    format!("unbalanced brace in \\{}", &caps[1]),
                ));
                continue;
            }
        };
        let key = src[arg.inner.clone()].trim().to_string();
        if key.is_empty() {
            sink.push(ParseWarning::new(
                WarningKind::MissingArgument,
                whole.start(),
                format!("\\{} with an empty key", &caps[1]),
            ));
            continue;
        }
        let span = whole.start()..arg.outer.end;
        if is_label {
            let kind = LabelKind::from_key(&key).unwrap_or_else(|| {
                let envs = envs.get_or_insert_with(|| {
                    all_envs(src, |n| LabelKind::from_env(n).is_some())
                });
                envs.iter()
                    .filter(|e| e.outer.start <= span.start && span.end <= e.outer.end)
                    .max_by_key(|e| e.outer.start)
                    .and_then(|e| LabelKind::from_env(&e.name))
                    .unwrap_or(LabelKind::Other)
            });
            labels.items.push(LabelDef { key, kind, span });
        } else {
            refs.items.push(RefCommand { key, span });
        }
    }
    (refs, labels)
}
