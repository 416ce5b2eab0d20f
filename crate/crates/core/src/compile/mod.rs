//! Running an external LaTeX engine on assembled projects.
//!
//! Each probe writes the project into its own throwaway directory, runs the
//! engine in batch mode with shell escape disabled and file access limited
//! to that directory, and kills the process when a run exceeds its time
//! limit. A bounded pool caps the number of engines running at once.

mod engine;
mod texlog;
mod pool;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::assembly::{wrap_snippet_with, AssembledProject, Preamble};
use crate::parse::RawPage;

pub use engine::{Engine, ENGINE_ENV};
pub use texlog::first_error;
pub use pool::EnginePool;

use engine::RunOutcome;

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("no LaTeX engine found (looked for {0}); set {ENGINE_ENV} or pass an engine path")]
    EngineMissing(String),
    #[error("engine {path} is not executable: {source}")]
    EngineUnusable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scratch directory: {0}")]
    Scratch(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileLimits {
    /// Wall-clock limit per engine run, in seconds.
    pub timeout_secs: f64,
    /// Engine passes, not counting the BibTeX pass.
    pub max_runs: u32,
}

impl Default for CompileLimits {
    fn default() -> Self {
        Self {
            timeout_secs: 60.0,
            max_runs: 2,
        }
    }
}

impl CompileLimits {
    pub fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout_secs.max(0.0))
    }

    /// The same limits with a single engine pass, used for page snippets.
    pub fn single_run(&self) -> Self {
        Self {
            max_runs: 1,
            ..self.clone()
        }
    }
}

/// Engine location and probe settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompileConfig {
    /// Engine binary; falls back to the environment variable, then `pdflatex`
    /// on `PATH`.
    pub engine: Option<PathBuf>,
    pub limits: CompileLimits,
    /// Maximum concurrent engine processes.
    pub workers: usize,
    pub keep_artifacts: bool,
}

impl Default for CompileConfig {
    fn default() -> Self {
        Self {
            engine: None,
            limits: CompileLimits::default(),
            workers: 4,
            keep_artifacts: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileResult {
    pub success: bool,
    /// Exit code of the last engine run; `None` when killed.
    pub engine_exit: Option<i32>,
    pub produced_pdf: bool,
    /// First fatal error in the log, empty on success.
    pub log_excerpt: String,
    pub duration_secs: f64,
    pub timed_out: bool,
    pub runs: u32,
    pub engine: String,
    pub preamble_fingerprint: String,
    /// Set when artifacts were kept for inspection.
    pub artifacts: Option<PathBuf>,
}

/// A configured engine plus the worker pool that throttles it.
#[derive(Debug)]
pub struct CompileProbe {
    engine: Engine,
    limits: CompileLimits,
    preamble: Preamble,
    pool: EnginePool,
    keep_artifacts: bool,
}

impl CompileProbe {
    pub fn new(cfg: &CompileConfig) -> Result<Self, CompileError> {
        Ok(Self {
            engine: Engine::discover(cfg.engine.as_deref())?,
            limits: cfg.limits.clone(),
            preamble: Preamble::default(),
            pool: EnginePool::new(cfg.workers),
            keep_artifacts: cfg.keep_artifacts,
        })
    }

    /// Use `preamble` for snippets wrapped by [`Self::compile_snippet`].
    pub fn with_preamble(mut self, preamble: Preamble) -> Self {
        self.preamble = preamble;
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn limits(&self) -> &CompileLimits {
        &self.limits
    }

    pub fn compile_project(&self, project: &AssembledProject) -> Result<CompileResult, CompileError> {
        self.compile_with(project, &self.limits)
    }

    /// Wrap one page in the minimal preamble and compile it once.
    pub fn compile_snippet(&self, page: &RawPage) -> Result<CompileResult, CompileError> {
        self.compile_snippet_with(page, &self.limits.single_run())
    }

    /// [`Self::compile_snippet`] with explicit limits.
    pub fn compile_snippet_with(
        &self,
        page: &RawPage,
        limits: &CompileLimits,
    ) -> Result<CompileResult, CompileError> {
        let project = wrap_snippet_with(&page.text, &self.preamble);
        self.compile_with(&project, limits)
    }

    fn compile_with(
        &self,
        project: &AssembledProject,
        limits: &CompileLimits,
    ) -> Result<CompileResult, CompileError> {
        let _slot = self.pool.acquire();
        let scratch = tempfile::Builder::new().prefix("texrecon-").tempdir()?;
        project.write_to(scratch.path())?;
        let started = Instant::now();
        let timeout = limits.timeout();

        let mut runs = 0;
        let mut last = self.engine.run_latex(scratch.path(), timeout)?;
        runs += 1;
        if last.ok() && runs < limits.max_runs {
            let rerun = if project.needs_bibtex() {
                // BibTeX failures surface as undefined citations, which are
                // warnings; the engine pass that follows decides success.
                let bib = self.engine.run_bibtex(scratch.path(), timeout)?;
                !bib.as_ref().is_some_and(|b| b.timed_out)
            } else {
                texlog::wants_rerun(&scratch.path().join("main.log"))
            };
            if rerun {
                last = self.engine.run_latex(scratch.path(), timeout)?;
                runs += 1;
            }
        }

        let produced_pdf = scratch.path().join("main.pdf").is_file();
        let success = last.ok() && produced_pdf;
        let log_excerpt = if success {
            String::new()
        } else {
            failure_excerpt(&last, scratch.path(), timeout)
        };
        let artifacts = if self.keep_artifacts {
            Some(scratch.keep())
        } else {
            None
        };
        Ok(CompileResult {
            success,
            engine_exit: last.exit,
            produced_pdf,
            log_excerpt,
            duration_secs: started.elapsed().as_secs_f64(),
            timed_out: last.timed_out,
            runs,
            engine: self.engine.identity().to_string(),
            preamble_fingerprint: project.preamble_fingerprint.clone(),
            artifacts,
        })
    }
}

fn failure_excerpt(run: &RunOutcome, dir: &std::path::Path, timeout: Duration) -> String {
    if run.timed_out {
        return format!("timed out after {:.1}s", timeout.as_secs_f64());
    }
    if let Some(e) = texlog::excerpt_from_file(&dir.join("main.log")) {
        return e;
    }
    match run.exit {
        Some(0) => "engine exited cleanly but produced no PDF".to_string(),
        Some(code) => format!("engine exited with status {code}"),
        None => "engine terminated by a signal".to_string(),
    }
}
