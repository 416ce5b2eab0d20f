use std::fs;
use std::path::Path;

use once_cell::sync::Lazy;
use regex::Regex;

// `-file-line-error` style: "./main.tex:12: Undefined control sequence."
static FILE_LINE: Lazy<Regex> = Lazy::new(|| Regex::new(r"^[^\s:]+:\d+: ").expect("log regex"));

/// The first fatal error in a TeX log and the line after it, which usually
/// shows the offending input.
pub fn first_error(log: &str) -> Option<String> {
    let lines: Vec<&str> = log.lines().collect();
    let idx = lines
        .iter()
        .position(|l| l.starts_with("! ") || FILE_LINE.is_match(l))?;
    let mut excerpt = lines[idx].trim_end().to_string();
    if let Some(next) = lines.get(idx + 1).map(|l| l.trim_end()).filter(|l| !l.is_empty()) {
        excerpt.push('\n');
        excerpt.push_str(next);
    }
    Some(excerpt)
}

pub(crate) fn excerpt_from_file(path: &Path) -> Option<String> {
    // Logs are Latin-1 at times; lossy decoding is fine for an excerpt.
    let bytes = fs::read(path).ok()?;
    first_error(&String::from_utf8_lossy(&bytes))
}

pub(crate) fn wants_rerun(path: &Path) -> bool {
    fs::read(path)
        .map(|b| String::from_utf8_lossy(&b).contains("Rerun to get"))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bang_style() {
        let log = "This is pdfTeX\n(./main.tex\n! Undefined control sequence.\nl.5 \\foo\n\nmore";
        assert_eq!(
            first_error(log).unwrap(),
            "! Undefined control sequence.\nl.5 \\foo"
        );
    }

    #[test]
    fn file_line_style() {
        let log = "x\n./main.tex:7: LaTeX Error: \\begin{tabular} on input line 5 ended by \\end{document}.\n";
        assert!(first_error(log).unwrap().contains("tabular"));
        assert!(first_error("all good\nOutput written on main.pdf").is_none());
    }
}
