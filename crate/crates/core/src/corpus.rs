//! Reading page records from JSON-lines files or directory trees.
//!
//! A JSON-lines stream holds one [`EvalRecord`] per line:
//!
//! ```json
//! {"doc_id": "paper-1", "page_index": 0, "generated": "...", "reference": "..."}
//! ```
//!
//! `reference` is optional when a separate reference corpus is supplied;
//! `completion_index` distinguishes several completions of one page. A
//! reference corpus stream uses `{"doc_id", "page_index", "text"}`.
//!
//! A directory tree has one subdirectory per document and one file per page.
//! The page index is the last run of digits in the file stem, so
//! `page_003.tex` is page 3.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::parse::RawPage;
use crate::reward::{ReferencePage, RewardConfig};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: cannot read a page index from file name")]
    BadPageName { path: PathBuf },
    #[error("duplicate record for {doc_id:?} page {page_index} completion {completion_index}")]
    Duplicate {
        doc_id: String,
        page_index: usize,
        completion_index: usize,
    },
}

impl IngestError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One generated page, optionally with its reference text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub doc_id: String,
    pub page_index: usize,
    pub generated: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(default)]
    pub completion_index: usize,
}

impl EvalRecord {
    pub fn generated_page(&self) -> RawPage {
        RawPage::new(&self.doc_id, self.page_index, &self.generated)
    }

    pub fn reference_page(&self) -> Option<RawPage> {
        self.reference
            .as_ref()
            .map(|r| RawPage::new(&self.doc_id, self.page_index, r))
    }
}

/// A reference page in a JSON-lines corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageRecord {
    pub doc_id: String,
    pub page_index: usize,
    pub text: String,
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, IngestError> {
    let file = fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IngestError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| IngestError::BadRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn page_index_from_name(path: &Path) -> Option<usize> {
    let stem = path.file_stem()?.to_str()?;
    let end = stem.rfind(|c: char| c.is_ascii_digit())? + 1;
    let start = stem[..end]
        .rfind(|c: char| !c.is_ascii_digit())
        .map_or(0, |i| i + 1);
    stem[start..end].parse().ok()
}

fn visible_entries(dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    let mut entries = Vec::new();
    for e in fs::read_dir(dir).map_err(|e| IngestError::io(dir, e))? {
        let path = e.map_err(|e| IngestError::io(dir, e))?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if !hidden {
            entries.push(path);
        }
    }
    entries.sort();
    Ok(entries)
}

/// Pages of a directory tree: `root/<doc_id>/<page file>`.
pub fn read_page_tree(root: &Path) -> Result<Vec<RawPage>, IngestError> {
    let mut pages = Vec::new();
    for doc_dir in visible_entries(root)? {
        if !doc_dir.is_dir() {
            continue;
        }
        let doc_id = doc_dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        for file in visible_entries(&doc_dir)? {
            if !file.is_file() {
                continue;
            }
            let page_index = page_index_from_name(&file)
                .ok_or_else(|| IngestError::BadPageName { path: file.clone() })?;
            let text = fs::read_to_string(&file).map_err(|e| IngestError::io(&file, e))?;
            pages.push(RawPage::new(doc_id.clone(), page_index, text));
        }
    }
    Ok(pages)
}

/// Generated records from a JSON-lines file or a directory tree.
pub fn load_generated(path: &Path) -> Result<Vec<EvalRecord>, IngestError> {
    let records: Vec<EvalRecord> = if path.is_dir() {
        read_page_tree(path)?
            .into_iter()
            .map(|p| EvalRecord {
                doc_id: p.doc_id,
                page_index: p.page_index,
                generated: p.text,
                reference: None,
                completion_index: 0,
            })
            .collect()
    } else {
        read_jsonl(path)?
    };
    let mut seen = HashSet::new();
    for r in &records {
        if !seen.insert((r.doc_id.as_str(), r.page_index, r.completion_index)) {
            return Err(IngestError::Duplicate {
                doc_id: r.doc_id.clone(),
                page_index: r.page_index,
                completion_index: r.completion_index,
            });
        }
    }
    Ok(records)
}

/// Reference pages from a JSON-lines file or a directory tree.
pub fn load_reference(path: &Path) -> Result<Vec<RawPage>, IngestError> {
    let pages = if path.is_dir() {
        read_page_tree(path)?
    } else {
        read_jsonl::<PageRecord>(path)?
            .into_iter()
            .map(|r| RawPage::new(r.doc_id, r.page_index, r.text))
            .collect()
    };
    let mut seen = HashSet::new();
    for p in &pages {
        if !seen.insert((p.doc_id.as_str(), p.page_index)) {
            return Err(IngestError::Duplicate {
                doc_id: p.doc_id.clone(),
                page_index: p.page_index,
                completion_index: 0,
            });
        }
    }
    Ok(pages)
}

/// Reference pages parsed once and looked up by `(doc_id, page_index)`.
#[derive(Debug, Clone)]
pub struct ReferenceCorpus {
    pages: BTreeMap<(String, usize), ReferencePage>,
    fingerprint: String,
}

impl ReferenceCorpus {
    pub fn new(pages: Vec<RawPage>, cfg: &RewardConfig) -> Self {
        let mut hasher = Sha256::new();
        let mut map = BTreeMap::new();
        for p in pages {
            map.insert((p.doc_id.clone(), p.page_index), p);
        }
        for ((doc, idx), p) in &map {
            hasher.update(doc.as_bytes());
            hasher.update([0]);
            hasher.update(idx.to_le_bytes());
            hasher.update((p.text.len() as u64).to_le_bytes());
            hasher.update(p.text.as_bytes());
        }
        let fingerprint = hex::encode(&hasher.finalize()[..8]);
        let pages = map
            .into_iter()
            .map(|(k, p)| (k, ReferencePage::new(p, cfg)))
            .collect();
        Self { pages, fingerprint }
    }

    /// Content hash over every page, independent of input order.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn page(&self, doc_id: &str, page_index: usize) -> Option<&ReferencePage> {
        self.pages.get(&(doc_id.to_string(), page_index))
    }

    /// Every page of one document, in page order.
    pub fn document(&self, doc_id: &str) -> Vec<RawPage> {
        self.pages
            .range((doc_id.to_string(), 0)..=(doc_id.to_string(), usize::MAX))
            .map(|(_, p)| p.page.clone())
            .collect()
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.pages.keys().map(|(d, _)| d.as_str()).collect();
        ids.dedup();
        ids
    }
}
