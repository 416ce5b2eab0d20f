//! Canonicalization of formulas, numbers and strings so that comparisons
//! ignore whitespace, layout and styling.

mod formula;
mod levenshtein;
mod numbers;
mod sequence;

pub use formula::{
    is_subsequence, normalize_formula, token_relation, FormulaNormalized, FormulaToken,
    TokenKind, TokenRelation,
};
pub use levenshtein::{levenshtein, normalize_levenshtein, normalize_levenshtein_capped};
pub use numbers::{extract_numbers, Decimal, DecimalError, NumericToken};
pub use sequence::{matching_blocks, sequence_similarity, MatchingBlock};

/// Collapse every run of whitespace to a single space and trim both ends.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
