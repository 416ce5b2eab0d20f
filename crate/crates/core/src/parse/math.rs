use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::scan::{is_escaped, outermost_envs};
use super::{Extracted, ParseWarning, Spanned, WarningKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MathKind {
    Equation,
    Eqnarray,
    Align,
    DisplayDollar,
}

impl MathKind {
    /// Starred forms map to their base kind.
    pub fn from_env(name: &str) -> Option<Self> {
        match name.trim_end_matches('*') {
            "equation" => Some(MathKind::Equation),
            "eqnarray" => Some(MathKind::Eqnarray),
            "align" => Some(MathKind::Align),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MathBlock {
    pub kind: MathKind,
    /// Content between the delimiters, delimiters excluded.
    pub body_raw: String,
    pub span: Range<usize>,
}

impl Spanned for MathBlock {
    fn span(&self) -> Range<usize> {
        self.span.clone()
    }
}

/// Display math: `equation`, `eqnarray`, `align` (starred or not) and
/// `$$...$$`. Nested environments belong to the outermost block; an
/// unterminated block runs to the end of the source.
pub fn extract_math_blocks(src: &str) -> Extracted<MathBlock> {
    let mut out = Extracted::default();
    for env in outermost_envs(src, |n| MathKind::from_env(n).is_some()) {
        if !env.closed {
            out.warnings.push(ParseWarning::new(
                WarningKind::UnclosedEnvironment,
                env.outer.start,
                format!("\\begin{{{}}} without a matching \\end", env.name),
            ));
        }
        out.items.push(MathBlock {
            kind: MathKind::from_env(&env.name).expect("selected"),
            body_raw: src[env.inner.clone()].to_string(),
            span: env.outer,
        });
    }

    let covered: Vec<Range<usize>> = out.items.iter().map(|b| b.span.clone()).collect();
    let inside = |pos: usize| covered.iter().any(|r| r.contains(&pos));

    let mut open: Option<usize> = None;
    let mut i = 0;
    while let Some(off) = src[i..].find("$$") {
        let pos = i + off;
        i = pos + 2;
        if is_escaped(src, pos) || inside(pos) {
            continue;
        }
        match open.take() {
            None => open = Some(pos),
            Some(start) => out.items.push(MathBlock {
                kind: MathKind::DisplayDollar,
                body_raw: src[start + 2..pos].to_string(),
                span: start..pos + 2,
            }),
        }
    }
    if let Some(start) = open {
        out.warnings.push(ParseWarning::new(
            WarningKind::UnclosedEnvironment,
            start,
            "$$ without a closing $$",
        ));
        out.items.push(MathBlock {
            kind: MathKind::DisplayDollar,
            body_raw: src[start + 2..].to_string(),
            span: start..src.len(),
        });
    }

    out.items.sort_by_key(|b| b.span.start);
    out
}
