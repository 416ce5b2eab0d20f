//! Endpoint behaviour, driven in-process through the router.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use texrecon::compile::{CompileConfig, CompileLimits, CompileProbe};
use texrecon::config::Config;
use texrecon::corpus::{read_page_tree, ReferenceCorpus};
use texrecon::parse::RawPage;
use texrecon::reward::{instantiate_tests, run_tests, RewardConfig};
use texrecon_service::{router, ServiceState};

fn fixture_pages() -> Vec<RawPage> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/selfeval");
    read_page_tree(&root).unwrap()
}

fn state(config: Config, probe: Option<CompileProbe>) -> Arc<ServiceState> {
    let corpus = ReferenceCorpus::new(fixture_pages(), &config.reward_config());
    Arc::new(ServiceState::new(corpus, config, probe))
}

fn text_only() -> Config {
    let mut c = Config::default();
    c.reward.compile_test = false;
    c
}

async fn call(state: Arc<ServiceState>, method: &str, path: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = router(state).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn page_text(i: usize) -> String {
    fixture_pages().remove(i).text
}

#[tokio::test]
async fn health_reports_hash_and_fingerprint() {
    let st = state(text_only(), None);
    let (status, body) = call(st, "GET", "/v1/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["config_hash"], text_only().hash());
    assert_eq!(body["corpus_pages"], 5);
    assert_eq!(body["corpus_fingerprint"].as_str().unwrap().len(), 16);
    assert!(body["engine"].is_null());
}

#[tokio::test]
async fn perfect_copy_scores_one() {
    let req = json!({"doc_id": "sample", "page_index": 1, "completions": [page_text(1)]});
    let (status, body) = call(state(text_only(), None), "POST", "/v1/reward", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["results"][0]["reward"], 1.0);
    assert_eq!(body["results"][0]["test_count"], 8);
    assert_eq!(body["metadata"]["config_hash"], text_only().hash());
}

#[tokio::test]
async fn results_follow_completion_order() {
    let good = page_text(2);
    let completions = vec![good.clone(), String::new(), good.replace("Table", "Tabel"), "noise".to_string()];
    let req = json!({"doc_id": "sample", "page_index": 2, "completions": completions});
    let (status, body) = call(state(text_only(), None), "POST", "/v1/reward", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::OK);
    let got: Vec<f64> = body["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["reward"].as_f64().unwrap())
        .collect();

    let cfg: RewardConfig = text_only().reward_config();
    let corpus = ReferenceCorpus::new(fixture_pages(), &cfg);
    let tests = instantiate_tests(corpus.page("sample", 2).unwrap(), &cfg);
    let expected: Vec<f64> = completions
        .iter()
        .map(|c| run_tests(&RawPage::new("sample", 2, c.as_str()), &tests, &cfg, None).unwrap().reward)
        .collect();
    assert_eq!(got, expected);
    assert_eq!(got[0], 1.0);
    assert!(got[1] < 1.0);
}

#[tokio::test]
async fn threshold_override_changes_hash() {
    let req = json!({
        "doc_id": "sample", "page_index": 0, "completions": ["x"],
        "overrides": {"thresholds": {"ds": 0.5}}
    });
    let (status, body) = call(state(text_only(), None), "POST", "/v1/reward", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::OK);
    assert_ne!(body["metadata"]["config_hash"], text_only().hash());
    assert_eq!(body["results"][0]["thresholds"]["ds"], 0.5);
}

#[tokio::test]
async fn unknown_page_is_not_found() {
    let req = json!({"doc_id": "sample", "page_index": 42, "completions": ["x"]});
    let (status, body) = call(state(text_only(), None), "POST", "/v1/reward", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["kind"], "not_found");
    let req = json!({"doc_id": "other", "pages": [{"page_index": 0, "text": "x"}]});
    let (status, _) = call(state(text_only(), None), "POST", "/v1/evaluate", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_bodies_are_validation_errors() {
    let st = state(text_only(), None);
    let (status, body) = call(st.clone(), "POST", "/v1/reward", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"]["kind"], "validation");

    let missing = json!({"doc_id": "sample", "page_index": 0});
    let (status, body) = call(st.clone(), "POST", "/v1/reward", Some(missing.to_string())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["kind"], "validation");

    let empty = json!({"doc_id": "sample", "page_index": 0, "completions": []});
    let (status, _) = call(st.clone(), "POST", "/v1/reward", Some(empty.to_string())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let bad_threshold = json!({
        "doc_id": "sample", "page_index": 0, "completions": ["x"],
        "overrides": {"thresholds": {"fa": 1.5}}
    });
    let (status, _) = call(st, "POST", "/v1/reward", Some(bad_threshold.to_string())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn missing_engine_is_a_service_error_not_a_zero() {
    let req = json!({"doc_id": "sample", "page_index": 0, "completions": [page_text(0)]});
    let (status, body) = call(state(Config::default(), None), "POST", "/v1/reward", Some(req.to_string())).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["error"]["kind"], "engine");
    assert!(body.get("results").is_none());
}

#[cfg(unix)]
mod with_stub_engine {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    const STUB_ENGINE: &str = "#!/bin/sh\nif [ \"$1\" = \"--version\" ]; then echo \"stub-tex 0.1\"; exit 0; fi\nif grep -q 'undefinedcs' main.tex; then printf '! Undefined control sequence.\\n' > main.log; exit 1; fi\nprintf 'ok\\n' > main.log\nprintf '%%PDF-1.4\\n' > main.pdf\nexit 0\n";
    const STUB_BIBTEX: &str = "#!/bin/sh\nprintf '' > \"$1.bbl\"\nexit 0\n";

    fn write_exec(path: &Path, body: &str) {
        std::fs::write(path, body).unwrap();
        std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o755)).unwrap();
    }

    fn stub_probe(dir: &Path, workers: usize) -> CompileProbe {
        let engine: PathBuf = dir.join("stubtex");
        write_exec(&engine, STUB_ENGINE);
        write_exec(&dir.join("bibtex"), STUB_BIBTEX);
        CompileProbe::new(&CompileConfig {
            engine: Some(engine),
            limits: CompileLimits {
                timeout_secs: 10.0,
                max_runs: 2,
            },
            workers,
            keep_artifacts: false,
        })
        .unwrap()
    }

    #[tokio::test]
    async fn compile_test_counts_toward_nine() {
        let dir = tempfile::tempdir().unwrap();
        let st = state(Config::default(), Some(stub_probe(dir.path(), 2)));
        let req = json!({
            "doc_id": "sample", "page_index": 0,
            "completions": [page_text(0), "\\undefinedcs"]
        });
        let (status, body) = call(st, "POST", "/v1/reward", Some(req.to_string())).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["results"][0]["reward"], 1.0);
        assert_eq!(body["results"][0]["test_count"], 9);
        assert_eq!(body["metadata"]["engine"], "stub-tex 0.1");
        let outcomes = body["results"][1]["outcomes"].as_array().unwrap();
        let compile = outcomes.iter().find(|o| o["test_id"] == "usability.compile").unwrap();
        assert_eq!(compile["passed"], false);
    }

    #[tokio::test]
    async fn evaluate_scores_a_full_document() {
        let dir = tempfile::tempdir().unwrap();
        let st = state(Config::default(), Some(stub_probe(dir.path(), 2)));
        let pages: Vec<Value> = fixture_pages()
            .into_iter()
            .map(|p| json!({"page_index": p.page_index, "text": p.text}))
            .collect();
        let req = json!({"doc_id": "sample", "pages": pages});
        let (status, body) = call(st, "POST", "/v1/evaluate", Some(req.to_string())).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["report"]["overall"], 1.0);
        for s in body["report"]["scores"].as_array().unwrap() {
            assert_eq!(s["value"], 1.0, "{s}");
        }
    }

    #[tokio::test]
    async fn concurrent_compile_requests_all_complete() {
        let dir = tempfile::tempdir().unwrap();
        let st = state(Config::default(), Some(stub_probe(dir.path(), 1)));
        let mut handles = Vec::new();
        for i in 0..8 {
            let st = st.clone();
            let req = json!({"doc_id": "sample", "page_index": i % 4, "completions": [page_text(i % 4), "x"]});
            handles.push(tokio::spawn(async move {
                call(st, "POST", "/v1/reward", Some(req.to_string())).await
            }));
        }
        for h in handles {
            let (status, body) = h.await.unwrap();
            assert_eq!(status, StatusCode::OK);
            assert_eq!(body["results"].as_array().unwrap().len(), 2);
            assert_eq!(body["results"][0]["reward"], 1.0);
        }
    }
}
