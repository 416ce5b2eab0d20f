use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::scan::{braced_arg, outermost_envs, skip_optional_arg, EnvSpan};
use super::{Extracted, ParseWarning, Spanned, WarningKind};
use crate::normalize::{extract_numbers, Decimal, NumericToken};

fn is_float(name: &str) -> bool {
    matches!(name, "table" | "table*" | "wraptable")
}

fn is_tabular(name: &str) -> bool {
    matches!(name, "tabular" | "tabular*" | "tabularx" | "longtable" | "longtable*")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableBlock {
    /// Rows of the longest tabular in the float, column spec excluded.
    pub body_raw: String,
    pub numbers: Vec<NumericToken>,
    /// Values that occur exactly once in `numbers`.
    pub unique_numbers: BTreeSet<Decimal>,
    pub page_index: Option<usize>,
    /// Span of the float (or of the bare tabular).
    pub span: Range<usize>,
}

impl Spanned for TableBlock {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

impl TableBlock {
    pub fn new(body_raw: String, page_index: Option<usize>, span: Range<usize>) -> Self {
        let numbers = extract_numbers(&body_raw);
        let mut counts: BTreeMap<&Decimal, usize> = BTreeMap::new();
        for n in &numbers {
            *counts.entry(&n.value).or_default() += 1;
        }
        let unique_numbers = counts
            .into_iter()
            .filter(|&(_, c)| c == 1)
            .map(|(v, _)| v.clone())
            .collect();
        Self {
            body_raw,
            numbers,
            unique_numbers,
            page_index,
            span,
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &Decimal> {
        self.numbers.iter().map(|n| &n.value)
    }
}

/// Content of a tabular after its positional and column-spec arguments.
fn tabular_body<'a>(src: &'a str, env: &EnvSpan) -> &'a str {
    let mut pos = env.inner.start;
    let needs_width = matches!(env.name.as_str(), "tabular*" | "tabularx");
    pos = skip_optional_arg(src, pos);
    if needs_width {
        if let Ok(Some(arg)) = braced_arg(src, pos) {
            pos = arg.outer.end;
        }
        pos = skip_optional_arg(src, pos);
    }
    if let Ok(Some(arg)) = braced_arg(src, pos) {
        if arg.outer.end <= env.inner.end {
            pos = arg.outer.end;
        }
    }
    &src[pos.min(env.inner.end)..env.inner.end]
}

/// One block per table float, keeping the longest tabular inside it, plus
/// one per bare tabular outside any float.
pub fn extract_tables(src: &str, page_index: Option<usize>) -> Extracted<TableBlock> {
    let mut out = Extracted::default();
    let floats = outermost_envs(src, is_float);
    let tabulars = outermost_envs(src, is_tabular);

    for env in floats.iter().chain(tabulars.iter()) {
        if !env.closed {
            out.warnings.push(ParseWarning::new(
                WarningKind::UnclosedEnvironment,
                env.outer.start,
                format!("\\begin{{{}}} without a matching \\end", env.name),
            ));
        }
    }

    for float in &floats {
        let longest = tabulars
            .iter()
            .filter(|t| float.outer.start <= t.outer.start && t.outer.end <= float.outer.end)
            .map(|t| tabular_body(src, t))
            .max_by_key(|body| body.chars().count());
        if let Some(body) = longest {
            out.items.push(TableBlock::new(
                body.to_string(),
                page_index,
                float.outer.clone(),
            ));
        }
    }
    for tab in &tabulars {
        let in_float = floats
            .iter()
            .any(|f| f.outer.start <= tab.outer.start && tab.outer.end <= f.outer.end);
        if !in_float {
            out.items.push(TableBlock::new(
                tabular_body(src, tab).to_string(),
                page_index,
                tab.outer.clone(),
            ));
        }
    }
    out.items.sort_by_key(|t| t.span.start);
    out
}
