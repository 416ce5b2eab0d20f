//! Process handling of the compile probe, exercised with a shell-script
//! stand-in for the engine. The stand-in only imitates exit codes, log
//! files and PDF output; real LaTeX behaviour is covered by the acceptance
//! suite.
#![cfg(unix)]

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use texrecon::assembly::{build_project, wrap_snippet_minimal, DocumentSource};
use texrecon::compile::{CompileConfig, CompileError, CompileLimits, CompileProbe};
use texrecon::parse::RawPage;

const STUB_ENGINE: &str = r#"#!/bin/sh
if [ "$1" = "--version" ]; then echo "stub-tex 0.1"; exit 0; fi
echo run >> runs.txt
if grep -q 'LOOPFOREVER' main.tex; then sleep 30; fi
if grep -q 'undefinedcs' main.tex; then
  printf 'This is stub-tex\n! Undefined control sequence.\nl.3 \\undefinedcs\n' > main.log
  exit 1
fi
if grep -q 'NOPDF' main.tex; then printf 'quiet\n' > main.log; exit 0; fi
printf 'Output written on main.pdf\n' > main.log
printf '%%PDF-1.4\n' > main.pdf
exit 0
"#;

const STUB_BIBTEX: &str = "#!/bin/sh\necho bib >> runs.txt\nprintf '' > \"$1.bbl\"\nexit 0\n";

fn write_exec(path: &Path, body: &str) {
    fs::write(path, body).unwrap();
    fs::set_permissions(path, fs::Permissions::from_mode(0o755)).unwrap();
}

struct Stub {
    _dir: tempfile::TempDir,
    engine: PathBuf,
}

fn stub() -> Stub {
    let dir = tempfile::tempdir().unwrap();
    let engine = dir.path().join("stubtex");
    write_exec(&engine, STUB_ENGINE);
    write_exec(&dir.path().join("bibtex"), STUB_BIBTEX);
    Stub { _dir: dir, engine }
}

fn probe(stub: &Stub, timeout_secs: f64, keep: bool) -> CompileProbe {
    CompileProbe::new(&CompileConfig {
        engine: Some(stub.engine.clone()),
        limits: CompileLimits {
            timeout_secs,
            max_runs: 2,
        },
        workers: 2,
        keep_artifacts: keep,
    })
    .unwrap()
}

fn project(body: &str) -> texrecon::assembly::AssembledProject {
    build_project(&DocumentSource::from_text("d", body))
}

#[test]
fn good_project_succeeds() {
    let s = stub();
    let p = probe(&s, 10.0, false);
    assert_eq!(p.engine().identity(), "stub-tex 0.1");
    let r = p.compile_project(&project("Hello")).unwrap();
    assert!(r.success && r.produced_pdf);
    assert_eq!(r.engine_exit, Some(0));
    assert!(r.log_excerpt.is_empty());
    assert_eq!(r.runs, 1);
    assert!(r.artifacts.is_none());
}

#[test]
fn failure_carries_log_excerpt() {
    let s = stub();
    let r = probe(&s, 10.0, false)
        .compile_project(&project("\\undefinedcs"))
        .unwrap();
    assert!(!r.success);
    assert_eq!(r.engine_exit, Some(1));
    assert_eq!(r.log_excerpt, "! Undefined control sequence.\nl.3 \\undefinedcs");
}

#[test]
fn exit_zero_without_pdf_is_failure() {
    let s = stub();
    let r = probe(&s, 10.0, false).compile_project(&project("NOPDF")).unwrap();
    assert!(!r.success && !r.produced_pdf);
    assert!(!r.log_excerpt.is_empty());
}

#[test]
fn runaway_engine_is_killed() {
    let s = stub();
    let started = Instant::now();
    let r = probe(&s, 0.5, false)
        .compile_project(&project("LOOPFOREVER"))
        .unwrap();
    assert!(r.timed_out && !r.success);
    assert_eq!(r.engine_exit, None);
    assert!(started.elapsed().as_secs_f64() < 5.5);
    assert!(r.log_excerpt.contains("timed out"));
}

#[test]
fn bibliography_adds_a_bibtex_pass() {
    let s = stub();
    let r = probe(&s, 10.0, true)
        .compile_project(&project("See \\cite{k}.\n@misc{k, note={n}}"))
        .unwrap();
    let dir = r.artifacts.clone().unwrap();
    assert_eq!(fs::read_to_string(dir.join("runs.txt")).unwrap(), "run\nbib\nrun\n");
    assert_eq!(r.runs, 2);
    assert!(dir.join("refs.bib").is_file());
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn snippet_uses_shim_and_one_run() {
    let s = stub();
    let r = probe(&s, 10.0, true)
        .compile_snippet(&RawPage::new("d", 0, "See Figure \\ref{fig:figure_9}."))
        .unwrap();
    let dir = r.artifacts.clone().unwrap();
    let main = fs::read_to_string(dir.join("main.tex")).unwrap();
    assert!(main.contains("\\renewcommand{\\ref}"));
    assert_eq!(main, wrap_snippet_minimal("See Figure \\ref{fig:figure_9}.").main_source);
    assert_eq!(r.runs, 1);
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn scratch_is_removed_by_default() {
    let s = stub();
    let before = count_scratch();
    probe(&s, 10.0, false).compile_project(&project("Hello")).unwrap();
    assert!(count_scratch() <= before);
}

fn count_scratch() -> usize {
    fs::read_dir(std::env::temp_dir())
        .unwrap()
        .filter_map(Result::ok)
        .filter(|e| e.file_name().to_string_lossy().starts_with("texrecon-"))
        .count()
}

#[test]
fn repeated_runs_agree() {
    let s = stub();
    let p = probe(&s, 10.0, false);
    let good = project("Hello");
    let bad = project("\\undefinedcs");
    for _ in 0..10 {
        assert!(p.compile_project(&good).unwrap().success);
        assert!(!p.compile_project(&bad).unwrap().success);
    }
}

#[test]
fn concurrent_probes_use_separate_directories() {
    let s = stub();
    let p = probe(&s, 10.0, true);
    let dirs: Vec<PathBuf> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..6)
            .map(|_| scope.spawn(|| p.compile_project(&project("Hello")).unwrap().artifacts.unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for d in &dirs {
        assert_eq!(fs::read_to_string(d.join("runs.txt")).unwrap(), "run\n");
    }
    let unique: std::collections::HashSet<_> = dirs.iter().collect();
    assert_eq!(unique.len(), 6);
    for d in dirs {
        fs::remove_dir_all(d).unwrap();
    }
}

#[test]
fn missing_engine_is_a_configuration_error() {
    let err = CompileProbe::new(&CompileConfig {
        engine: Some(PathBuf::from("/nonexistent/texrecon-no-such-engine")),
        ..Default::default()
    })
    .unwrap_err();
    assert!(matches!(err, CompileError::EngineMissing(_)));
}
