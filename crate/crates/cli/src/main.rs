//! `texrecon` command-line tool.
//!
//! Exit status: 0 on success, 1 on an infrastructure failure (engine
//! missing, I/O, worker pool), 2 on invalid input or configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use texrecon::assembly::{build_project_with, merge_pages};
use texrecon::compile::CompileProbe;
use texrecon::config::Config;
use texrecon::corpus::{load_generated, load_reference, ReferenceCorpus};
use texrecon::parse::RawPage;
use texrecon::report::{emit_report, run_evaluate, run_reward_batch, ReportFormat, RunError};
use texrecon::reward::RewardError;

#[derive(Parser)]
#[command(name = "texrecon", version, about = "Score LaTeX page reconstructions against reference sources")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// LaTeX engine binary. Defaults to $TEXRECON_ENGINE, then pdflatex.
    #[arg(long, global = true)]
    engine: Option<PathBuf>,
    /// Worker count for documents and engine processes.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Keep compile scratch directories.
    #[arg(long, global = true)]
    keep_artifacts: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Score whole documents with all nine metrics.
    Evaluate {
        /// Generated pages: JSON lines or a directory tree.
        #[arg(long)]
        generated: PathBuf,
        /// Reference pages; omit when records carry a `reference` field.
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Unit-test reward per generated page, one JSON line each.
    Reward {
        #[arg(long)]
        generated: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Skip the compile test.
        #[arg(long)]
        no_compile: bool,
    },
    /// Write the compilable project for one document.
    Assemble {
        /// Pages: JSON lines of {doc_id, page_index, text} or a directory tree.
        #[arg(long)]
        pages: PathBuf,
        /// Document to assemble; optional when the input holds one.
        #[arg(long)]
        doc: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Assemble and compile one document, printing the compile result.
    Compile {
        #[arg(long)]
        pages: PathBuf,
        #[arg(long)]
        doc: Option<String>,
    },
    /// Run the HTTP reward service.
    Serve {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

enum Failure {
    Input(anyhow::Error),
    Infra(anyhow::Error),
}

trait Classify<T> {
    fn input(self) -> Result<T, Failure>;
    fn infra(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Input(e.into()))
    }
    fn infra(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Infra(e.into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Infra(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).input()?,
        None => Config::default(),
    };
    if let Some(e) = &cli.engine {
        cfg.compile.engine = Some(e.clone());
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Input(anyhow!("--workers must be at least 1")));
        }
        cfg.compile.workers = w;
    }
    cfg.compile.keep_artifacts |= cli.keep_artifacts;
    Ok(cfg)
}

fn probe(cfg: &Config) -> Result<CompileProbe, Failure> {
    CompileProbe::new(&cfg.compile)
        .map(|p| p.with_preamble(cfg.preamble.clone()))
        .infra()
}

fn reference_corpus(path: Option<&Path>, cfg: &Config) -> Result<Option<ReferenceCorpus>, Failure> {
    match path {
        None => Ok(None),
        Some(p) => {
            let pages = load_reference(p).input()?;
            Ok(Some(ReferenceCorpus::new(pages, &cfg.reward_config())))
        }
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())).infra(),
        None => std::io::stdout().write_all(bytes).infra(),
    }
}

fn one_document(path: &Path, doc: Option<&str>) -> Result<Vec<RawPage>, Failure> {
    let pages = load_reference(path).input()?;
    let doc = match doc {
        Some(d) => d.to_string(),
        None => {
            let mut ids: Vec<&str> = pages.iter().map(|p| p.doc_id.as_str()).collect();
            ids.sort();
            ids.dedup();
            match ids.as_slice() {
                [one] => one.to_string(),
                [] => return Err(Failure::Input(anyhow!("{}: no pages", path.display()))),
                _ => return Err(Failure::Input(anyhow!("{} documents in input; pick one with --doc", ids.len()))),
            }
        }
    };
    let chosen: Vec<RawPage> = pages.into_iter().filter(|p| p.doc_id == doc).collect();
    if chosen.is_empty() {
        return Err(Failure::Input(anyhow!("no pages for document {doc:?}")));
    }
    Ok(chosen)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Evaluate {
            generated,
            reference,
            output,
        } => {
            let records = load_generated(generated).input()?;
            let corpus = reference_corpus(reference.as_deref(), &cfg)?;
            let probe = probe(&cfg)?;
            let report = run_evaluate(&records, corpus.as_ref(), &cfg, &probe).map_err(|e| match e {
                RunError::InvalidInput(_) => Failure::Input(e.into()),
                _ => Failure::Infra(e.into()),
            })?;
            for err in &report.errors {
                log::warn!("{}: {}", err.doc_id, err.message);
            }
            let format = match cli.format {
                Format::Json => ReportFormat::Json,
                Format::Table => ReportFormat::Table,
            };
            write_output(output.as_deref(), &emit_report(&report, format))
        }
        Command::Reward {
            generated,
            reference,
            output,
            no_compile,
        } => {
            let mut cfg = cfg.clone();
            if *no_compile {
                cfg.reward.compile_test = false;
            }
            let records = load_generated(generated).input()?;
            let corpus = reference_corpus(reference.as_deref(), &cfg)?;
            let probe = if cfg.reward.compile_test { Some(probe(&cfg)?) } else { None };
            let lines = run_reward_batch(&records, corpus.as_ref(), &cfg, probe.as_ref()).map_err(|e| match e {
                RewardError::Config(_) => Failure::Input(e.into()),
                _ => Failure::Infra(e.into()),
            })?;
            let mut out = Vec::new();
            for l in &lines {
                match cli.format {
                    Format::Json => {
                        serde_json::to_writer(&mut out, l).infra()?;
                        out.push(b'\n');
                    }
                    Format::Table => {
                        let score = match (&l.result, &l.error) {
                            (Some(r), _) => format!("{:.4}  {}/{}", r.reward, r.passed(), r.test_count),
                            (None, Some(e)) => format!("error: {e}"),
                            (None, None) => String::new(),
                        };
                        writeln!(out, "{}\t{}\t{}\t{score}", l.doc_id, l.page_index, l.completion_index).infra()?;
                    }
                }
            }
            write_output(output.as_deref(), &out)
        }
        Command::Assemble { pages, doc, out } => {
            let source = merge_pages(one_document(pages, doc.as_deref())?).input()?;
            let project = build_project_with(&source, &cfg.preamble);
            fs::create_dir_all(out).with_context(|| format!("creating {}", out.display())).infra()?;
            project
                .write_to(out)
                .with_context(|| format!("writing project to {}", out.display()))
                .infra()?;
            eprintln!("wrote {} (preamble {})", out.join("main.tex").display(), project.preamble_fingerprint);
            Ok(())
        }
        Command::Compile { pages, doc } => {
            let source = merge_pages(one_document(pages, doc.as_deref())?).input()?;
            let probe = probe(&cfg)?;
            let result = probe
                .compile_project(&build_project_with(&source, &cfg.preamble))
                .infra()?;
            let mut bytes = serde_json::to_vec_pretty(&result).infra()?;
            bytes.push(b'\n');
            write_output(None, &bytes)
        }
        Command::Serve { reference, bind } => {
            let pages = load_reference(reference).input()?;
            let corpus = ReferenceCorpus::new(pages, &cfg.reward_config());
            let probe = match probe(&cfg) {
                Ok(p) => Some(p),
                Err(Failure::Infra(e)) if !cfg.reward.compile_test => {
                    log::warn!("serving without a LaTeX engine: {e:#}");
                    None
                }
                Err(e) => return Err(e),
            };
            let runtime = tokio::runtime::Runtime::new().infra()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(bind.as_str())
                    .await
                    .with_context(|| format!("binding {bind}"))
                    .infra()?;
                eprintln!(
                    "serving {} reference pages (fingerprint {}) on {bind}",
                    corpus.len(),
                    corpus.fingerprint()
                );
                let state = Arc::new(texrecon_service::ServiceState::new(corpus, cfg.clone(), probe));
                texrecon_service::serve(listener, state).await.infra()
            })
        }
    }
}
