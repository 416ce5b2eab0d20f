use super::scan::is_escaped;

/// Remove every unescaped `%` and the rest of its line. The newline itself
/// is kept, so line structure survives.
pub fn strip_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut line_start = 0;
    for line in src.split_inclusive('\n') {
        let mut cut = None;
        for (i, _) in line.match_indices('%') {
            if !is_escaped(src, line_start + i) {
                cut = Some(i);
                break;
            }
        }
        match cut {
            Some(i) => {
                out.push_str(&line[..i]);
                if line.ends_with('\n') {
                    out.push('\n');
                }
            }
            None => out.push_str(line),
        }
        line_start += line.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comment_line() {
        assert_eq!(strip_comments("a % note\nb"), "a \nb");
    }

    #[test]
    fn escaped_percent_kept() {
        assert_eq!(strip_comments(r"45\% done"), r"45\% done");
    }

    #[test]
    fn linebreak_then_comment() {
        assert_eq!(strip_comments("a \\\\% gone\nb"), "a \\\\\nb");
    }

    #[test]
    fn whole_line_comment_keeps_newline() {
        assert_eq!(strip_comments("% header\nbody"), "\nbody");
    }

    #[test]
    fn no_trailing_newline() {
        assert_eq!(strip_comments("x % y"), "x ");
    }
}
