//! Low-level scanning helpers shared by the extractors.

use std::ops::Range;

/// True when the byte at `pos` is preceded by an odd number of backslashes.
pub(crate) fn is_escaped(src: &str, pos: usize) -> bool {
    let bytes = src.as_bytes();
    let mut n = 0;
    let mut i = pos;
    while i > 0 && bytes[i - 1] == b'\\' {
        n += 1;
        i -= 1;
    }
    n % 2 == 1
}

/// Given the byte index of an opening `{`, return the index of its matching
/// `}`. Escaped braces (`\{`, `\}`) do not count.
pub(crate) fn matching_brace(src: &str, open: usize) -> Option<usize> {
    let bytes = src.as_bytes();
    debug_assert_eq!(bytes.get(open), Some(&b'{'));
    let mut depth = 0usize;
    let mut i = open;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

/// Skip ASCII whitespace starting at `pos`.
pub(crate) fn skip_ws(src: &str, mut pos: usize) -> usize {
    let bytes = src.as_bytes();
    while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
        pos += 1;
    }
    pos
}

/// Skip an optional `[...]` argument (no nesting of brackets beyond braces).
pub(crate) fn skip_optional_arg(src: &str, pos: usize) -> usize {
    let p = skip_ws(src, pos);
    let bytes = src.as_bytes();
    if bytes.get(p) != Some(&b'[') {
        return pos;
    }
    let mut depth = 0usize;
    let mut i = p;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            b']' if depth == 0 => return i + 1,
            _ => {}
        }
        i += 1;
    }
    pos
}

/// A braced argument: the full span including braces, and the inner span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BracedArg {
    pub outer: Range<usize>,
    pub inner: Range<usize>,
}

/// Read a `{...}` argument starting at `pos` (after optional whitespace).
/// `Err(open)` means an opening brace was found but never closed; `Ok(None)`
/// means there is no braced argument at all.
pub(crate) fn braced_arg(src: &str, pos: usize) -> Result<Option<BracedArg>, usize> {
    let p = skip_ws(src, pos);
    if src.as_bytes().get(p) != Some(&b'{') {
        return Ok(None);
    }
    match matching_brace(src, p) {
        Some(close) => Ok(Some(BracedArg {
            outer: p..close + 1,
            inner: p + 1..close,
        })),
        None => Err(p),
    }
}

/// One `\begin{name}` or `\end{name}` token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct EnvToken {
    pub begin: bool,
    pub name: String,
    /// Span of the whole `\begin{name}` / `\end{name}` text.
    pub span: Range<usize>,
}

/// Every `\begin{..}`/`\end{..}` token in document order.
pub(crate) fn env_tokens(src: &str) -> Vec<EnvToken> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while let Some(off) = src[i..].find('\\') {
        let start = i + off;
        if is_escaped(src, start) {
            i = start + 1;
            continue;
        }
        let rest = &src[start + 1..];
        let (begin, kw_len) = if rest.starts_with("begin") {
            (true, 5)
        } else if rest.starts_with("end") {
            (false, 3)
        } else {
            i = start + 1;
            continue;
        };
        let after_kw = start + 1 + kw_len;
        // `\endinput`, `\beginning` and friends are different commands.
        if bytes
            .get(after_kw)
            .is_some_and(|b| b.is_ascii_alphabetic())
        {
            i = after_kw;
            continue;
        }
        match braced_arg(src, after_kw) {
            Ok(Some(arg)) => {
                let name = src[arg.inner.clone()].trim().to_string();
                out.push(EnvToken {
                    begin,
                    name,
                    span: start..arg.outer.end,
                });
                i = arg.outer.end;
            }
            _ => i = after_kw,
        }
    }
    out
}

/// A matched environment instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct EnvSpan {
    pub name: String,
    /// From the start of `\begin` to the end of `\end{..}` (or end of source).
    pub outer: Range<usize>,
    /// Content between the delimiters.
    pub inner: Range<usize>,
    pub closed: bool,
}

/// Find every outermost instance of an environment whose name satisfies
/// `select`. Nested instances of selected environments are absorbed into the
/// enclosing one. An unclosed environment runs to the end of `src`.
pub(crate) fn outermost_envs(src: &str, select: impl Fn(&str) -> bool) -> Vec<EnvSpan> {
    let tokens = env_tokens(src);
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < tokens.len() {
        let tok = &tokens[idx];
        if !(tok.begin && select(&tok.name)) {
            idx += 1;
            continue;
        }
        let name = tok.name.clone();
        let start = tok.span.start;
        let inner_start = tok.span.end;
        let mut depth = 1usize;
        let mut j = idx + 1;
        let mut close = None;
        while j < tokens.len() {
            let t = &tokens[j];
            if t.name == name {
                if t.begin {
                    depth += 1;
                } else {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(j);
                        break;
                    }
                }
            }
            j += 1;
        }
        match close {
            Some(j) => {
                let end_tok = &tokens[j];
                out.push(EnvSpan {
                    name,
                    outer: start..end_tok.span.end,
                    inner: inner_start..end_tok.span.start,
                    closed: true,
                });
                idx = j + 1;
            }
            None => {
                out.push(EnvSpan {
                    name,
                    outer: start..src.len(),
                    inner: inner_start..src.len(),
                    closed: false,
                });
                break;
            }
        }
    }
    out
}

/// All instances (not only outermost) of environments matching `select`,
/// used for containment queries such as "is this label inside a figure".
pub(crate) fn all_envs(src: &str, select: impl Fn(&str) -> bool) -> Vec<EnvSpan> {
    let tokens = env_tokens(src);
    let mut stack: Vec<(String, usize, usize)> = Vec::new();
    let mut out = Vec::new();
    for t in &tokens {
        if !select(&t.name) {
            continue;
        }
        if t.begin {
            stack.push((t.name.clone(), t.span.start, t.span.end));
        } else if let Some(pos) = stack.iter().rposition(|(n, _, _)| *n == t.name) {
            let (name, start, inner_start) = stack.remove(pos);
            out.push(EnvSpan {
                name,
                outer: start..t.span.end,
                inner: inner_start..t.span.start,
                closed: true,
            });
        }
    }
    for (name, start, inner_start) in stack {
        out.push(EnvSpan {
            name,
            outer: start..src.len(),
            inner: inner_start..src.len(),
            closed: false,
        });
    }
    out.sort_by_key(|e| e.outer.start);
    out
}
