use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever the default package set changes.
pub const PREAMBLE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum PreambleError {
    #[error("invalid preamble file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("package name {0:?} is not a plain identifier")]
    BadPackage(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Package {
    pub name: String,
    #[serde(default)]
    pub options: Vec<String>,
}

impl Package {
    fn new(name: &str, options: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            options: options.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// The fixed preamble injected into every assembled project.
///
/// Loaded from TOML to extend the package set for corpora with unusual
/// macros; the default is a conservative article setup covering math,
/// tables, graphics, colour, hyperlinks and natbib citations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Preamble {
    pub version: u32,
    pub document_class: String,
    pub class_options: Vec<String>,
    pub packages: Vec<Package>,
    /// Raw lines appended after the packages.
    pub extra: Vec<String>,
    pub bibliography_style: String,
}

impl Default for Preamble {
    fn default() -> Self {
        Self {
            version: PREAMBLE_VERSION,
            document_class: "article".to_string(),
            class_options: Vec::new(),
            packages: vec![
                Package::new("amsmath", &[]),
                Package::new("amssymb", &[]),
                Package::new("graphicx", &[]),
                Package::new("booktabs", &[]),
                Package::new("multirow", &[]),
                Package::new("array", &[]),
                Package::new("xcolor", &["table"]),
                Package::new("url", &[]),
                Package::new("natbib", &["numbers"]),
                // hyperref goes last.
                Package::new("hyperref", &[]),
            ],
            // article's \maketitle errors out without a \title.
            extra: vec![r"\title{}".to_string(), r"\author{}".to_string(), r"\date{}".to_string()],
            bibliography_style: "plainnat".to_string(),
        }
    }
}

impl Preamble {
    pub fn from_toml_str(s: &str) -> Result<Self, PreambleError> {
        let p: Preamble = toml::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PreambleError> {
        let ok = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-');
        if !ok(&self.document_class) {
            return Err(PreambleError::BadPackage(self.document_class.clone()));
        }
        match self.packages.iter().find(|p| !ok(&p.name)) {
            Some(p) => Err(PreambleError::BadPackage(p.name.clone())),
            None => Ok(()),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let opts = |o: &[String]| {
            if o.is_empty() {
                String::new()
            } else {
                format!("[{}]", o.join(","))
            }
        };
        let _ = writeln!(
            out,
            "\\documentclass{}{{{}}}",
            opts(&self.class_options),
            self.document_class
        );
        for p in &self.packages {
            let _ = writeln!(out, "\\usepackage{}{{{}}}", opts(&p.options), p.name);
        }
        for line in &self.extra {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    /// Short hash of the rendered preamble, reported next to CSR scores.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.render().as_bytes());
        format!("v{}-{}", self.version, &hex::encode(digest)[..12])
    }
}
