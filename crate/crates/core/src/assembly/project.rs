use std::fs;
use std::io;
use std::path::Path;

use once_cell::sync::Lazy;
use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use super::{DocumentSource, Preamble};
use crate::parse::extract_bib_entries;

/// File name of the shared figure placeholder inside `figures/`.
pub const PLACEHOLDER_NAME: &str = "placeholder.pdf";

static STRIP: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"\\(?:documentclass|usepackage|RequirePackage)\s*(?:\[[^\]]*\])?\s*\{[^}]*\}|\\(?:begin|end)\s*\{document\}|\\bibliography(?:style)?\s*\{[^}]*\}",
    )
    .expect("strip regex")
});

static INCLUDEGRAPHICS: Lazy<Regex> = Lazy::new(|| {
    Regex::new(r"\\includegraphics\s*(\*?)\s*(?:\[([^\]]*)\])?\s*\{[^}]*\}").expect("graphics regex")
});

// Makes \ref and friends print a fixed marker so a page compiled on its own
// is judged on its own syntax.
const REFERENCE_SHIM: &str = "\\AtBeginDocument{%\n  \\renewcommand{\\ref}[1]{??}%\n  \\renewcommand{\\eqref}[1]{(??)}%\n  \\renewcommand{\\pageref}[1]{??}%\n}\n";

/// A one-page 1-inch grey square, written as `figures/placeholder.pdf`.
pub static PLACEHOLDER_PDF: Lazy<Vec<u8>> = Lazy::new(|| {
    let content = "0.8 g 0 0 72 72 re f\n";
    let objects = [
        "<< /Type /Catalog /Pages 2 0 R >>".to_string(),
        "<< /Type /Pages /Kids [3 0 R] /Count 1 >>".to_string(),
        "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 72 72] /Resources << >> /Contents 4 0 R >>"
            .to_string(),
        format!("<< /Length {} >>\nstream\n{content}endstream", content.len()),
    ];
    let mut pdf = String::from("%PDF-1.4\n");
    let mut offsets = Vec::new();
    for (i, body) in objects.iter().enumerate() {
        offsets.push(pdf.len());
        pdf.push_str(&format!("{} 0 obj\n{body}\nendobj\n", i + 1));
    }
    let xref = pdf.len();
    pdf.push_str(&format!("xref\n0 {}\n0000000000 65535 f \n", objects.len() + 1));
    for off in offsets {
        pdf.push_str(&format!("{off:010} 00000 n \n"));
    }
    pdf.push_str(&format!(
        "trailer\n<< /Size {} /Root 1 0 R >>\nstartxref\n{xref}\n%%EOF\n",
        objects.len() + 1
    ));
    pdf.into_bytes()
});

/// A standalone LaTeX project ready for the compile probe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledProject {
    pub main_source: String,
    /// BibTeX entries cut from the body, written as `refs.bib`.
    pub bib_source: Option<String>,
    /// Paths (relative to the project root) of the placeholder graphics.
    pub figure_placeholders: Vec<String>,
    pub preamble_fingerprint: String,
    /// True for single-page snippets compiled with the reference shim.
    pub reference_shim: bool,
}

impl AssembledProject {
    /// Whether the compile probe should run a BibTeX pass.
    pub fn needs_bibtex(&self) -> bool {
        self.bib_source.is_some()
    }

    /// Write `main.tex`, `refs.bib` and `figures/` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("main.tex"), &self.main_source)?;
        if let Some(bib) = &self.bib_source {
            fs::write(dir.join("refs.bib"), bib)?;
        }
        for p in &self.figure_placeholders {
            let path = dir.join(p);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, PLACEHOLDER_PDF.as_slice())?;
        }
        Ok(())
    }
}

struct Body {
    text: String,
    bib: Vec<String>,
    uses_graphics: bool,
}

fn prepare_body(src: &str) -> Body {
    let entries = extract_bib_entries(src).items;
    let mut text = String::with_capacity(src.len());
    let mut last = 0;
    for e in &entries {
        text.push_str(&src[last..e.span.start]);
        last = e.span.end;
    }
    text.push_str(&src[last..]);

    let text = STRIP.replace_all(&text, "").into_owned();
    let placeholder = format!("figures/{PLACEHOLDER_NAME}");
    let mut uses_graphics = false;
    let text = INCLUDEGRAPHICS
        .replace_all(&text, |c: &Captures| {
            uses_graphics = true;
            // A one-page placeholder cannot honour page selection.
            let opts: Vec<&str> = c
                .get(2)
                .map(|m| m.as_str().split(',').map(str::trim).filter(|o| !o.starts_with("page")).collect())
                .unwrap_or_default();
            let opts = if opts.is_empty() {
                String::new()
            } else {
                format!("[{}]", opts.join(","))
            };
            format!("\\includegraphics{}{opts}{{{placeholder}}}", &c[1])
        })
        .into_owned();
    Body {
        text: text.trim().to_string(),
        bib: entries.into_iter().map(|e| e.body_raw).collect(),
        uses_graphics,
    }
}

fn assemble(src: &str, preamble: &Preamble, snippet: bool) -> AssembledProject {
    let body = prepare_body(src);
    let mut main = preamble.render();
    if snippet {
        main.push_str(REFERENCE_SHIM);
    }
    main.push_str("\\begin{document}\n");
    if !body.text.is_empty() {
        main.push_str(&body.text);
        main.push('\n');
    }
    // A snippet's BibTeX entries are dropped: the page is compiled for its
    // own syntax and citation validity is scored elsewhere.
    let bib_source = if !snippet && !body.bib.is_empty() {
        main.push_str(&format!(
            "\\nocite{{*}}\n\\bibliographystyle{{{}}}\n\\bibliography{{refs}}\n",
            preamble.bibliography_style
        ));
        Some(body.bib.join("\n\n") + "\n")
    } else {
        None
    };
    main.push_str("\\end{document}\n");
    AssembledProject {
        main_source: main,
        bib_source,
        figure_placeholders: if body.uses_graphics {
            vec![format!("figures/{PLACEHOLDER_NAME}")]
        } else {
            Vec::new()
        },
        preamble_fingerprint: preamble.fingerprint(),
        reference_shim: snippet,
    }
}

/// Full-document project with the default preamble.
pub fn build_project(doc: &DocumentSource) -> AssembledProject {
    build_project_with(doc, &Preamble::default())
}

pub fn build_project_with(doc: &DocumentSource, preamble: &Preamble) -> AssembledProject {
    assemble(&doc.merged, preamble, false)
}

/// Single-page project with the default preamble and the reference shim.
pub fn wrap_snippet_minimal(snippet: &str) -> AssembledProject {
    wrap_snippet_with(snippet, &Preamble::default())
}

pub fn wrap_snippet_with(snippet: &str, preamble: &Preamble) -> AssembledProject {
    assemble(snippet, preamble, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn project(body: &str) -> AssembledProject {
        build_project(&DocumentSource::from_text("d", body))
    }

    fn count(hay: &str, needle: &str) -> usize {
        hay.matches(needle).count()
    }

    #[test]
    fn bib_moved_out() {
        let p = project("Text \\cite{k}.\n@article{k, title={T}}\n");
        assert_eq!(p.bib_source.as_deref(), Some("@article{k, title={T}}\n"));
        assert!(!p.main_source.contains("@article"));
        assert!(p.main_source.contains("\\bibliography{refs}"));
    }

    #[test]
    fn graphics_rewritten() {
        let p = project("\\includegraphics[width=0.5\\linewidth,page=2]{figure_3.pdf}");
        assert!(p
            .main_source
            .contains("\\includegraphics[width=0.5\\linewidth]{figures/placeholder.pdf}"));
        assert_eq!(p.figure_placeholders, vec!["figures/placeholder.pdf"]);
        for m in INCLUDEGRAPHICS.captures_iter(&p.main_source) {
            assert!(m[0].ends_with("{figures/placeholder.pdf}"));
        }
    }

    #[test]
    fn empty_body_and_single_document_env() {
        let p = project("");
        assert!(p.main_source.ends_with("\\begin{document}\n\\end{document}\n"));
        let q = project("\\documentclass{article}\\usepackage[utf8]{inputenc}\\begin{document}Hi\\end{document}");
        assert_eq!(count(&q.main_source, "\\begin{document}"), 1);
        assert_eq!(count(&q.main_source, "\\end{document}"), 1);
        assert_eq!(count(&q.main_source, "\\documentclass"), 1);
    }

    #[test]
    fn snippet_differs_only_in_shim_and_bib() {
        let s = "Hello \\ref{fig:figure_9}.";
        let snip = wrap_snippet_minimal(s);
        let full = project(s);
        assert!(snip.reference_shim);
        assert_eq!(snip.main_source.replace(REFERENCE_SHIM, ""), full.main_source);
        let with_bib = wrap_snippet_minimal("@misc{k, note={n}}");
        assert!(with_bib.bib_source.is_none());
        assert!(!with_bib.main_source.contains('@'));
    }

    #[test]
    fn placeholder_is_a_pdf() {
        let pdf = PLACEHOLDER_PDF.as_slice();
        assert!(pdf.starts_with(b"%PDF-1.4"));
        let text = std::str::from_utf8(pdf).unwrap();
        let xref: usize = text.rsplit("startxref\n").next().unwrap().lines().next().unwrap().parse().unwrap();
        assert!(text[xref..].starts_with("xref"));
        let obj3 = text.find("3 0 obj").unwrap();
        assert!(text.contains(&format!("{obj3:010} 00000 n")));
    }

    #[test]
    fn write_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = project("\\includegraphics{a.png} \\cite{k} @misc{k, note={n}}");
        p.write_to(dir.path()).unwrap();
        assert!(dir.path().join("main.tex").is_file());
        assert!(dir.path().join("refs.bib").is_file());
        assert!(dir.path().join("figures/placeholder.pdf").is_file());
    }
}
