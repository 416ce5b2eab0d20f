use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use super::CompileError;

/// Environment variable naming the engine binary.
pub const ENGINE_ENV: &str = "TEXRECON_ENGINE";

const DEFAULT_ENGINE: &str = "pdflatex";

#[derive(Debug, Clone, Copy)]
pub(crate) struct RunOutcome {
    pub exit: Option<i32>,
    pub timed_out: bool,
}

impl RunOutcome {
    pub fn ok(&self) -> bool {
        self.exit == Some(0) && !self.timed_out
    }
}

/// A resolved engine binary, its BibTeX companion and its version line.
#[derive(Debug, Clone)]
pub struct Engine {
    path: PathBuf,
    bibtex: Option<PathBuf>,
    identity: String,
}

impl Engine {
    /// Resolve the engine from `configured`, then [`ENGINE_ENV`], then
    /// `pdflatex` on `PATH`.
    pub fn discover(configured: Option<&Path>) -> Result<Self, CompileError> {
        let wanted: PathBuf = match configured {
            Some(p) => p.to_path_buf(),
            None => std::env::var_os(ENGINE_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_ENGINE)),
        };
        let path = which::which(&wanted)
            .map_err(|_| CompileError::EngineMissing(wanted.display().to_string()))?;
        let bibtex = path
            .parent()
            .map(|dir| dir.join("bibtex"))
            .filter(|p| p.is_file())
            .or_else(|| which::which("bibtex").ok());
        let identity = version_line(&path).unwrap_or_else(|| path.display().to_string());
        Ok(Self {
            path,
            bibtex,
            identity,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// First line of `--version`, or the path when that fails.
    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub(crate) fn run_latex(&self, dir: &Path, timeout: Duration) -> Result<RunOutcome, CompileError> {
        let mut cmd = Command::new(&self.path);
        cmd.args([
            "-interaction=nonstopmode",
            "-halt-on-error",
            "-no-shell-escape",
            "-file-line-error",
            "main.tex",
        ]);
        run(cmd, &self.path, dir, timeout)
    }

    pub(crate) fn run_bibtex(&self, dir: &Path, timeout: Duration) -> Result<Option<RunOutcome>, CompileError> {
        let Some(bibtex) = &self.bibtex else {
            log::warn!("no bibtex next to {}; skipping bibliography pass", self.path.display());
            return Ok(None);
        };
        let mut cmd = Command::new(bibtex);
        cmd.arg("main");
        run(cmd, bibtex, dir, timeout).map(Some)
    }
}

fn run(mut cmd: Command, path: &Path, dir: &Path, timeout: Duration) -> Result<RunOutcome, CompileError> {
    cmd.current_dir(dir)
        // kpathsea: no reads or writes outside the working directory.
        .env("openin_any", "p")
        .env("openout_any", "p")
        .env("shell_escape", "f")
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null());
    let mut child = cmd.spawn().map_err(|source| CompileError::EngineUnusable {
        path: path.to_path_buf(),
        source,
    })?;
    match child.wait_timeout(timeout)? {
        Some(status) => Ok(RunOutcome {
            exit: status.code(),
            timed_out: false,
        }),
        None => {
            let _ = child.kill();
            let _ = child.wait();
            Ok(RunOutcome {
                exit: None,
                timed_out: true,
            })
        }
    }
}

fn version_line(path: &Path) -> Option<String> {
    let mut child = Command::new(path)
        .arg("--version")
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .ok()?;
    let status = match child.wait_timeout(Duration::from_secs(10)).ok()? {
        Some(s) => s,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return None;
        }
    };
    if !status.success() {
        return None;
    }
    let mut out = String::new();
    std::io::Read::read_to_string(child.stdout.as_mut()?, &mut out).ok()?;
    out.lines().map(str::trim).find(|l| !l.is_empty()).map(str::to_string)
}
