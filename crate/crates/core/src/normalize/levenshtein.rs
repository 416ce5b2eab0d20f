//! Character-level Levenshtein distance.
//!
//! Documents run to tens of thousands of characters, so the distance is
//! computed with the block-based bit-parallel recurrence (Myers, extended to
//! multiple machine words by Hyyrö). Memory is linear in the shorter input
//! and time is `O(ceil(m / 64) * n)`.

use std::collections::HashMap;

const WORD: usize = 64;

/// Per-character match masks for the pattern, one bit per pattern position.
struct PatternMasks {
    words: usize,
    masks: HashMap<char, Vec<u64>>,
}

impl PatternMasks {
    fn new(pattern: &[char]) -> Self {
        let words = pattern.len().div_ceil(WORD);
        let mut masks: HashMap<char, Vec<u64>> = HashMap::new();
        for (i, &c) in pattern.iter().enumerate() {
            masks.entry(c).or_insert_with(|| vec![0; words])[i / WORD] |= 1u64 << (i % WORD);
        }
        Self { words, masks }
    }

    #[inline]
    fn get(&self, c: char, word: usize) -> u64 {
        self.masks.get(&c).map_or(0, |m| m[word])
    }
}

/// Edit distance with unit insert, delete and substitute costs.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_chars(&a, &b)
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    // Strip the common prefix and suffix; they never contribute edits.
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);

    // The pattern (bit-vector side) is the shorter string.
    let (pattern, text) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if pattern.is_empty() {
        return text.len();
    }

    let masks = PatternMasks::new(pattern);
    let words = masks.words;
    let last = 1u64 << ((pattern.len() - 1) % WORD);
    let mut vp = vec![!0u64; words];
    let mut vn = vec![0u64; words];
    let mut dist = pattern.len();

    for &c in text {
        // Horizontal delta entering row 0 is always +1.
        let mut hp_carry = 1u64;
        let mut hn_carry = 0u64;
        for w in 0..words {
            let pm = masks.get(c, w);
            let v_p = vp[w];
            let v_n = vn[w];

            let x = pm | hn_carry;
            let d0 = (((x & v_p).wrapping_add(v_p)) ^ v_p) | x | v_n;
            let mut hp = v_n | !(d0 | v_p);
            let mut hn = d0 & v_p;

            let (hp_out, hn_out) = if w + 1 < words {
                (hp >> 63, hn >> 63)
            } else {
                (u64::from(hp & last != 0), u64::from(hn & last != 0))
            };

            hp = (hp << 1) | hp_carry;
            hn = (hn << 1) | hn_carry;
            hp_carry = hp_out;
            hn_carry = hn_out;

            vp[w] = hn | !(d0 | hp);
            vn[w] = hp & d0;
        }
        dist += hp_carry as usize;
        dist -= hn_carry as usize;
    }
    dist
}

/// `1 - lev(a, b) / max(|a|, |b|)` over characters; two empty strings are
/// identical and score 1.0.
pub fn normalize_levenshtein(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein_chars(&a, &b) as f64 / longest as f64
}

/// [`normalize_levenshtein`] on inputs truncated to at most `cap` characters
/// each. `None` disables the cap.
pub fn normalize_levenshtein_capped(a: &str, b: &str, cap: Option<usize>) -> f64 {
    match cap {
        None => normalize_levenshtein(a, b),
        Some(cap) => {
            let cut = |s: &str| s.char_indices().nth(cap).map_or(s.len(), |(i, _)| i);
            normalize_levenshtein(&a[..cut(a)], &b[..cut(b)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dp(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        let mut cur = vec![0; b.len() + 1];
        for i in 1..=a.len() {
            cur[0] = i;
            for j in 1..=b.len() {
                let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
                cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        prev[b.len()]
    }

    #[test]
    fn kitten_sitting() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        let s = normalize_levenshtein("kitten", "sitting");
        assert!((s - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn edge_cases() {
        assert_eq!(normalize_levenshtein("", ""), 1.0);
        assert_eq!(normalize_levenshtein("", "abc"), 0.0);
        assert_eq!(normalize_levenshtein("same", "same"), 1.0);
        assert_eq!(levenshtein("ab", "ba"), 2);
        assert_eq!(levenshtein("日本語", "日本"), 1);
    }

    #[test]
    fn crosses_word_boundaries() {
        let a: String = (0..300).map(|i| (b'a' + (i % 7) as u8) as char).collect();
        let b: String = (0..257).map(|i| (b'a' + (i % 5) as u8) as char).collect();
        assert_eq!(levenshtein(&a, &b), dp(&a, &b));
    }

    #[test]
    fn cap_truncates() {
        assert_eq!(normalize_levenshtein_capped("abcX", "abcY", Some(3)), 1.0);
        assert!(normalize_levenshtein_capped("abcX", "abcY", None) < 1.0);
    }

    proptest! {
        #[test]
        fn matches_dp(a in "[abc\\\\{}]{0,200}", b in "[abc\\\\{}]{0,200}") {
            prop_assert_eq!(levenshtein(&a, &b), dp(&a, &b));
        }

        #[test]
        fn symmetric_and_bounded(a in "\\PC{0,40}", b in "\\PC{0,40}") {
            let s = normalize_levenshtein(&a, &b);
            prop_assert_eq!(s, normalize_levenshtein(&b, &a));
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(s == 1.0, a == b);
        }
    }
}
