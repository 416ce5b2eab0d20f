//! Formula canonicalization and token-level comparison.
//!
//! A formula is tokenized into commands, single-letter variables, numbers
//! and single-character operators. Layout-only material (`\left`, `\right`,
//! sizing and spacing commands, alignment `&` and row breaks), `\label`,
//! `\tag` and comments are dropped. The canonical string is the
//! concatenation of the remaining lexemes, so it carries no whitespace.

use serde::{Deserialize, Serialize};

use crate::parse::strip_comments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Command,
    Variable,
    Number,
    Operator,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormulaToken {
    pub kind: TokenKind,
    pub lexeme: String,
}

impl FormulaToken {
    fn new(kind: TokenKind, lexeme: impl Into<String>) -> Self {
        Self {
            kind,
            lexeme: lexeme.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaNormalized {
    pub canonical: String,
    pub tokens: Vec<FormulaToken>,
}

const LAYOUT_COMMANDS: &[&str] = &[
    r"\left", r"\right", r"\middle", r"\big", r"\Big", r"\bigg", r"\Bigg", r"\bigl", r"\bigr",
    r"\Bigl", r"\Bigr", r"\biggl", r"\biggr", r"\Biggl", r"\Biggr", r"\bigm", r"\Bigm",
    r"\displaystyle", r"\textstyle", r"\scriptstyle", r"\scriptscriptstyle", r"\limits",
    r"\nolimits", r"\nonumber", r"\notag", r"\quad", r"\qquad", r"\,", r"\;", r"\:", r"\!",
    r"\ ", r"\\", r"\hfill", r"\allowbreak", r"\newline",
];

// Commands dropped together with their braced argument.
const DROP_WITH_ARG: &[&str] = &[r"\label", r"\tag", r"\hspace", r"\vspace"];

fn tokenize_raw(src: &str) -> Vec<FormulaToken> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '\\' {
            let start = i;
            i += 1;
            if i < chars.len() && chars[i].is_ascii_alphabetic() {
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                // Starred commands such as \tag* or \operatorname*.
                if i < chars.len() && chars[i] == '*' {
                    i += 1;
                }
            } else if i < chars.len() {
                i += 1;
            }
            out.push(FormulaToken::new(
                TokenKind::Command,
                chars[start..i].iter().collect::<String>(),
            ));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(FormulaToken::new(
                TokenKind::Number,
                chars[start..i].iter().collect::<String>(),
            ));
        } else if c.is_alphabetic() {
            out.push(FormulaToken::new(TokenKind::Variable, c));
            i += 1;
        } else {
            out.push(FormulaToken::new(TokenKind::Operator, c));
            i += 1;
        }
    }
    out
}

fn drop_layout(tokens: Vec<FormulaToken>) -> Vec<FormulaToken> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut iter = tokens.into_iter().peekable();
    while let Some(tok) = iter.next() {
        match tok.kind {
            TokenKind::Command => {
                let name = tok.lexeme.trim_end_matches('*');
                if LAYOUT_COMMANDS.contains(&name) {
                    // `\\[2pt]` row spacing.
                    if name == r"\\" && iter.peek().is_some_and(|t| t.lexeme == "[") {
                        for t in iter.by_ref() {
                            if t.lexeme == "]" {
                                break;
                            }
                        }
                    }
                    continue;
                }
                if DROP_WITH_ARG.contains(&name) {
                    if iter.peek().is_some_and(|t| t.lexeme == "{") {
                        let mut depth = 0usize;
                        for t in iter.by_ref() {
                            match t.lexeme.as_str() {
                                "{" => depth += 1,
                                "}" => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                _ => {}
                            }
                        }
                    }
                    continue;
                }
                out.push(tok);
            }
            TokenKind::Operator if tok.lexeme == "&" => {}
            _ => out.push(tok),
        }
    }
    out
}

/// Canonical form and token list of a math block body.
pub fn normalize_formula(body_raw: &str) -> FormulaNormalized {
    let tokens = drop_layout(tokenize_raw(&strip_comments(body_raw)));
    let canonical = tokens.iter().map(|t| t.lexeme.as_str()).collect();
    FormulaNormalized { canonical, tokens }
}

/// How two token sequences relate under the formula-correctness rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenRelation {
    Identical,
    /// The first sequence is an ordered subsequence of the second.
    SubsequenceOf,
    /// The second sequence is an ordered subsequence of the first.
    SupersequenceOf,
    Mismatch,
}

impl TokenRelation {
    /// Identical or one contains the other in order.
    pub fn is_correct(self) -> bool {
        !matches!(self, TokenRelation::Mismatch)
    }
}

/// Is `needle` an ordered (not necessarily contiguous) subsequence of `hay`?
pub fn is_subsequence<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}

pub fn token_relation(a: &[FormulaToken], b: &[FormulaToken]) -> TokenRelation {
    if a == b {
        TokenRelation::Identical
    } else if is_subsequence(a, b) {
        TokenRelation::SubsequenceOf
    } else if is_subsequence(b, a) {
        TokenRelation::SupersequenceOf
    } else {
        TokenRelation::Mismatch
    }
}
