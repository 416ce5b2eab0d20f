use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{MetricConfig, MetricDetails, MetricName, MetricScore};
use crate::normalize::Decimal;
use crate::parse::TableBlock;

/// Comparison of one reference table with one generated table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMatch {
    pub generated_index: usize,
    /// Multiset intersection size over the reference number count.
    pub overlap: f64,
    /// Share of the reference's unique numbers present in the generated
    /// table; 0 when the reference has none.
    pub unique_hit: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCheck {
    pub reference_index: usize,
    pub page_index: Option<usize>,
    pub reference_numbers: usize,
    pub candidates: usize,
    /// The first matching candidate, or the one with the highest overlap.
    pub best: Option<TableMatch>,
    pub matched: bool,
}

fn counts(t: &TableBlock) -> HashMap<&Decimal, usize> {
    let mut m = HashMap::new();
    for v in t.values() {
        *m.entry(v).or_default() += 1;
    }
    m
}

pub fn table_match(
    reference: &TableBlock,
    generated: &TableBlock,
    generated_index: usize,
    cfg: &MetricConfig,
) -> TableMatch {
    let gen_counts = counts(generated);
    let shared: usize = counts(reference)
        .iter()
        .map(|(v, &n)| n.min(gen_counts.get(v).copied().unwrap_or(0)))
        .sum();
    let overlap = if reference.numbers.is_empty() {
        0.0
    } else {
        shared as f64 / reference.numbers.len() as f64
    };
    let unique_hit = if reference.unique_numbers.is_empty() {
        0.0
    } else {
        let hits = reference
            .unique_numbers
            .iter()
            .filter(|v| gen_counts.contains_key(v))
            .count();
        hits as f64 / reference.unique_numbers.len() as f64
    };
    let matched = overlap >= cfg.table_high_overlap
        || (overlap >= cfg.table_moderate_overlap && unique_hit >= cfg.table_unique_hit);
    TableMatch {
        generated_index,
        overlap,
        unique_hit,
        matched,
    }
}

fn same_page(a: Option<usize>, b: Option<usize>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    }
}

/// Fraction of reference tables (with at least one number) matched by some
/// generated table on the same page. Page scoping applies only when both
/// tables carry a page index.
pub fn score_ta(
    reference: &[TableBlock],
    generated: &[TableBlock],
    cfg: &MetricConfig,
) -> MetricScore {
    let mut tables = Vec::new();
    let mut excluded_empty = 0;
    for (ri, rt) in reference.iter().enumerate() {
        if rt.numbers.is_empty() {
            excluded_empty += 1;
            continue;
        }
        let mut candidates = 0;
        let mut best: Option<TableMatch> = None;
        for (gi, gt) in generated.iter().enumerate() {
            if !same_page(rt.page_index, gt.page_index) {
                continue;
            }
            candidates += 1;
            let m = table_match(rt, gt, gi, cfg);
            let better = match &best {
                None => true,
                Some(b) => !b.matched && (m.matched || m.overlap > b.overlap),
            };
            if better {
                best = Some(m);
            }
        }
        let matched = best.as_ref().is_some_and(|b| b.matched);
        tables.push(TableCheck {
            reference_index: ri,
            page_index: rt.page_index,
            reference_numbers: rt.numbers.len(),
            candidates,
            best,
            matched,
        });
    }
    let details = MetricDetails::Ta {
        tables,
        excluded_empty,
        high_overlap: cfg.table_high_overlap,
        moderate_overlap: cfg.table_moderate_overlap,
        unique_hit: cfg.table_unique_hit,
    };
    MetricScore::from_details(MetricName::Ta, details)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(body: &str, page: Option<usize>) -> TableBlock {
        TableBlock::new(body.to_string(), page, 0..body.len())
    }

    #[test]
    fn identical_tables_match() {
        let t = table("1.2 & 3.4 \\\\ 5.6 & 1.2", None);
        let s = score_ta(std::slice::from_ref(&t), std::slice::from_ref(&t), &MetricConfig::default());
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn moderate_overlap_with_unique_hits() {
        // Ten numbers: 1 and 2 each appear four times, 3 and 4 once.
        let r = table("1 & 1 & 1 & 1 & 2 & 2 & 2 & 2 & 3 & 4", None);
        // Keeps 3, 4 and five of the repeated values: overlap 0.7.
        let g = table("1 & 1 & 1 & 2 & 2 & 3 & 4", None);
        let m = table_match(&r, &g, 0, &MetricConfig::default());
        assert!((m.overlap - 0.7).abs() < 1e-12);
        assert_eq!(m.unique_hit, 1.0);
        assert!(m.matched);
    }

    #[test]
    fn low_overlap_fails() {
        let r = table("1 & 2 & 3 & 4 & 5 & 6 & 7 & 8 & 9 & 10", None);
        let g = table("1 & 2 & 3", None);
        assert_eq!(score_ta(&[r], &[g], &MetricConfig::default()).value, 0.0);
    }

    #[test]
    fn page_scoping_and_empty_exclusion() {
        let r = vec![table("1 & 2", Some(0)), table("no numbers", Some(0))];
        let wrong_page = vec![table("1 & 2", Some(1))];
        let s = score_ta(&r, &wrong_page, &MetricConfig::default());
        assert_eq!(s.value, 0.0);
        assert!(matches!(s.details, MetricDetails::Ta { excluded_empty: 1, .. }));
        let unpaged = vec![table("1 & 2", None)];
        assert_eq!(score_ta(&r, &unpaged, &MetricConfig::default()).value, 1.0);
    }

    #[test]
    fn vacuous_without_numeric_tables() {
        let s = score_ta(&[table("a & b", None)], &[], &MetricConfig::default());
        assert_eq!(s.value, 1.0);
        assert!(s.is_vacuous());
    }
}
