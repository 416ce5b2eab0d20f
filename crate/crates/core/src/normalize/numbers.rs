//! Numeric tokens for table comparison.

use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

/// An exact decimal value kept in canonical textual form: optional `-`,
/// integer digits without leading zeros, and a fractional part without
/// trailing zeros. Two decimals are equal iff their values are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Decimal(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a decimal numeral: {0:?}")]
pub struct DecimalError(String);

impl Decimal {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.parse().expect("canonical decimal parses")
    }

    fn canonical(negative: bool, int: &str, frac: &str) -> Self {
        let int = int.trim_start_matches('0');
        let frac = frac.trim_end_matches('0');
        let int = if int.is_empty() { "0" } else { int };
        let zero = int == "0" && frac.is_empty();
        let mut s = String::new();
        if negative && !zero {
            s.push('-');
        }
        s.push_str(int);
        if !frac.is_empty() {
            s.push('.');
            s.push_str(frac);
        }
        Decimal(s)
    }
}

impl FromStr for Decimal {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
            return Err(DecimalError(s.to_string()));
        }
        Ok(Decimal::canonical(negative, int, frac))
    }
}

impl TryFrom<String> for Decimal {
    type Error = DecimalError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Decimal> for String {
    fn from(d: Decimal) -> Self {
        d.0
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A number found in table text together with the text it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericToken {
    pub value: Decimal,
    pub raw: String,
}

// Commands removed together with all of their arguments: layout, colour and
// cross-reference plumbing whose arguments often contain digits.
static DROP_WITH_ARGS: Lazy<Regex> = Lazy::new(|| {
    Regex::new(concat!(
        r"\\(?:cline|cmidrule|rule|vspace|hspace|rowcolor|cellcolor|color|arrayrulecolor",
        r"|setlength|addlinespace|specialrule|includegraphics|label|ref|eqref|cite[A-Za-z]*",
        r"|resizebox|scalebox|renewcommand|arraystretch|fontsize)\*?",
        r"(?:\s*\([^)]*\))?(?:\s*\[[^\]]*\])*(?:\s*\{[^{}]*\})*"
    ))
    .expect("drop regex")
});

// Commands whose leading arguments are structural (column counts, widths);
// only the final content argument is kept.
static STRUCTURAL_PREFIX: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"\\(?:multicolumn\s*\{[^{}]*\}\s*\{[^{}]*\}|multirow\s*(?:\[[^\]]*\])?\s*\{[^{}]*\}\s*(?:\[[^\]]*\])?\s*\{[^{}]*\}|textcolor\s*\{[^{}]*\}|makebox\s*(?:\[[^\]]*\])*|parbox\s*(?:\[[^\]]*\])*\s*\{[^{}]*\})")
        .expect("structural regex")
});

// Row-end spacing such as `\\[2pt]`.
static ROW_SPACING: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\\\\\s*\[[^\]]*\]").expect("row spacing regex"));

static COMMAND_NAME: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"\\[A-Za-z]+\*?").expect("command regex"));

static NUMBER: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[0-9]+(?:\.[0-9]+)?|\.[0-9]+").expect("number regex"));

/// Remove styling and layout so only cell content remains. Wrappers such as
/// `\textbf{91.1}` become `{91.1}`; `\%` disappears.
fn strip_table_markup(text: &str) -> String {
    let s = ROW_SPACING.replace_all(text, r"\\");
    let s = DROP_WITH_ARGS.replace_all(&s, " ");
    let s = STRUCTURAL_PREFIX.replace_all(&s, " ");
    let s = s.replace(r"\%", " ");
    let s = COMMAND_NAME.replace_all(&s, " ");
    s.replace('\u{2212}', "-")
}

/// All decimal numerals in a piece of table text, in order.
///
/// Percent signs are dropped, a sign directly in front of a number is kept
/// when it is not itself glued to a preceding word or digit (`-3.2` is
/// negative, `GPT-5.3` is not), and `1,234` yields two numbers.
pub fn extract_numbers(text: &str) -> Vec<NumericToken> {
    let cleaned = strip_table_markup(text);
    let bytes = cleaned.as_bytes();
    let mut out = Vec::new();
    for m in NUMBER.find_iter(&cleaned) {
        let mut start = m.start();
        let mut negative = false;
        if start > 0 && matches!(bytes[start - 1], b'-' | b'+') {
            let glued = start >= 2 && (bytes[start - 2] as char).is_ascii_alphanumeric();
            if !glued {
                negative = bytes[start - 1] == b'-';
                start -= 1;
            }
        }
        let digits = m.as_str();
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        out.push(NumericToken {
            value: Decimal::canonical(negative, int, frac),
            raw: cleaned[start..m.end()].to_string(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(text: &str) -> Vec<String> {
        extract_numbers(text)
            .into_iter()
            .map(|t| t.value.to_string())
            .collect()
    }

    #[test]
    fn bold_wrapper_is_invisible() {
        assert_eq!(values(r"\textbf{91.1}"), vec!["91.1"]);
        assert_eq!(values(r"\underline{\textit{65.2}}"), vec!["65.2"]);
    }

    #[test]
    fn percentages() {
        assert_eq!(values(r"78.5\%"), vec!["78.5"]);
        assert_eq!(values(r"89.5\% & 3\%"), vec!["89.5", "3"]);
    }

    #[test]
    fn no_numbers() {
        assert!(values("n/a").is_empty());
        assert!(values(r"\multicolumn{4}{c|}{Structural} \cmidrule(lr){2-5}").is_empty());
    }

    #[test]
    fn signs_and_hyphens() {
        assert_eq!(values("-3.2 & +1"), vec!["-3.2", "1"]);
        assert_eq!(values("GPT-5.3"), vec!["5.3"]);
        assert_eq!(values("$-0.0$"), vec!["0"]);
        assert_eq!(values("\u{2212}4"), vec!["-4"]);
    }

    #[test]
    fn thousands_separator_splits() {
        assert_eq!(values("1,234"), vec!["1", "234"]);
    }

    #[test]
    fn canonical_decimal_equality() {
        let a: Decimal = "91.10".parse().unwrap();
        let b: Decimal = "091.1".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "91.1");
        assert_eq!(".5".parse::<Decimal>().unwrap().as_str(), "0.5");
        assert!("1.2.3".parse::<Decimal>().is_err());
        assert!("".parse::<Decimal>().is_err());
    }

    #[test]
    fn layout_numbers_ignored() {
        assert_eq!(
            values(r"\rowcolor{gray!20} \multirow{2}{*}{\textbf{12}} & 4.5 \\[2pt] \cline{1-3}"),
            vec!["12", "4.5"]
        );
    }

    #[test]
    fn raw_reparses_to_value() {
        for tok in extract_numbers(r"-1.50 & \textbf{2.0}\% & 007") {
            assert_eq!(tok.raw.parse::<Decimal>().unwrap(), tok.value);
        }
    }
}
