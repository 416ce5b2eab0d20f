use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{MetricConfig, MetricDetails, MetricName, MetricScore};
use crate::normalize::{normalize_formula, sequence_similarity, token_relation, FormulaNormalized, TokenRelation};
use crate::parse::MathBlock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaAlignment {
    pub reference_index: usize,
    pub generated_index: usize,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub reference_index: usize,
    pub canonical: String,
    pub generated_index: Option<usize>,
    pub similarity: Option<f64>,
    pub relation: Option<TokenRelation>,
    pub correct: bool,
}

/// One-to-one greedy alignment. Pairs with similarity strictly above
/// `threshold` are taken in descending similarity; ties go to the earlier
/// reference formula, then the earlier generated one.
pub fn align_formulas(
    reference: &[FormulaNormalized],
    generated: &[FormulaNormalized],
    threshold: f64,
) -> Vec<FormulaAlignment> {
    let mut pairs = Vec::new();
    for (ri, r) in reference.iter().enumerate() {
        for (gi, g) in generated.iter().enumerate() {
            let similarity = sequence_similarity(&r.canonical, &g.canonical);
            if similarity > threshold {
                pairs.push(FormulaAlignment {
                    reference_index: ri,
                    generated_index: gi,
                    similarity,
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.similarity
            .partial_cmp(&a.similarity)
            .unwrap_or(Ordering::Equal)
            .then(a.reference_index.cmp(&b.reference_index))
            .then(a.generated_index.cmp(&b.generated_index))
    });
    let mut ref_used = vec![false; reference.len()];
    let mut gen_used = vec![false; generated.len()];
    let mut out = Vec::new();
    for p in pairs {
        if ref_used[p.reference_index] || gen_used[p.generated_index] {
            continue;
        }
        ref_used[p.reference_index] = true;
        gen_used[p.generated_index] = true;
        out.push(p);
    }
    out.sort_by_key(|p| p.reference_index);
    out
}

/// Fraction of reference display formulas whose aligned generated formula
/// is token-identical or an ordered sub/supersequence of it.
pub fn score_fa(reference: &[MathBlock], generated: &[MathBlock], cfg: &MetricConfig) -> MetricScore {
    let r: Vec<_> = reference.iter().map(|m| normalize_formula(&m.body_raw)).collect();
    let g: Vec<_> = generated.iter().map(|m| normalize_formula(&m.body_raw)).collect();
    let mut checks: Vec<FormulaCheck> = r
        .iter()
        .enumerate()
        .map(|(i, f)| FormulaCheck {
            reference_index: i,
            canonical: f.canonical.clone(),
            generated_index: None,
            similarity: None,
            relation: None,
            correct: false,
        })
        .collect();
    for a in align_formulas(&r, &g, cfg.formula_align_threshold) {
        let relation = token_relation(&r[a.reference_index].tokens, &g[a.generated_index].tokens);
        let c = &mut checks[a.reference_index];
        c.generated_index = Some(a.generated_index);
        c.similarity = Some(a.similarity);
        c.relation = Some(relation);
        c.correct = relation.is_correct();
    }
    let details = MetricDetails::Fa {
        formulas: checks,
        align_threshold: cfg.formula_align_threshold,
    };
    MetricScore::from_details(MetricName::Fa, details)
}
