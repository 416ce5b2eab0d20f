//! HTTP front end for the reward oracle.
//!
//! The reference corpus is parsed once at startup and shared read-only by
//! every request. Endpoints, all JSON:
//!
//! | method | path           | body                | response            |
//! |--------|----------------|---------------------|---------------------|
//! | GET    | `/v1/health`   |                     | [`HealthResponse`]  |
//! | POST   | `/v1/reward`   | [`RewardRequest`]   | [`RewardResponse`]  |
//! | POST   | `/v1/evaluate` | [`EvaluateRequest`] | [`EvaluateResponse`]|
//!
//! Failures come back as `{"error": {"kind": ..., "message": ...}}` with
//! kind `not_found` (404), `validation` (400 for an unreadable body, 422 for
//! a readable but unacceptable one), `engine` (503) or `internal` (500). A
//! reward of 0.0 always means the completion failed its tests, never that
//! the service did.
//!
//! Compile tests go through the probe's bounded engine pool, so concurrent
//! requests queue for a slot rather than overrunning it.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use texrecon::compile::CompileProbe;
use texrecon::config::Config;
use texrecon::corpus::{EvalRecord, ReferenceCorpus};
use texrecon::metrics::DocumentReport;
use texrecon::report::{run_evaluate, RunError};
use texrecon::reward::{instantiate_tests, run_tests, RewardError, RewardResult, RewardThresholds};

/// Version of the endpoint schemas; part of every path.
pub const API_VERSION: u32 = 1;

/// Everything a request may read. Immutable after startup.
pub struct ServiceState {
    corpus: ReferenceCorpus,
    config: Config,
    probe: Option<CompileProbe>,
}

impl ServiceState {
    /// `probe` may be absent; compile-bearing requests then fail with an
    /// engine error.
    pub fn new(corpus: ReferenceCorpus, config: Config, probe: Option<CompileProbe>) -> Self {
        Self {
            corpus,
            config,
            probe,
        }
    }

    fn engine(&self) -> Option<String> {
        self.probe.as_ref().map(|p| p.engine().identity().to_string())
    }

    fn metadata(&self, config_hash: String) -> ServiceMetadata {
        ServiceMetadata {
            api_version: API_VERSION,
            config_hash,
            corpus_fingerprint: self.corpus.fingerprint().to_string(),
            engine: self.engine(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub api_version: u32,
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub corpus_pages: usize,
    pub engine: Option<String>,
}

/// Per-request changes to the loaded configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardOverrides {
    /// Include the compile test; trainers often switch it off for fast
    /// inner loops.
    #[serde(default)]
    pub compile_test: Option<bool>,
    #[serde(default)]
    pub thresholds: Option<RewardThresholds>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardRequest {
    pub doc_id: String,
    pub page_index: usize,
    pub completions: Vec<String>,
    #[serde(default)]
    pub overrides: RewardOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceMetadata {
    pub api_version: u32,
    /// Hash of the configuration the request was scored under, overrides
    /// included.
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub engine: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResponse {
    /// `results[i]` scores `completions[i]`.
    pub results: Vec<RewardResult>,
    pub metadata: ServiceMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PageText {
    pub page_index: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    pub doc_id: String,
    pub pages: Vec<PageText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateResponse {
    pub report: DocumentReport,
    pub metadata: ServiceMetadata,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Engine(String),
    #[error("{0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub error: ErrorBody,
}

impl ApiError {
    fn status_and_kind(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ApiError::Malformed(_) => (StatusCode::BAD_REQUEST, "validation"),
            ApiError::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            ApiError::Engine(_) => (StatusCode::SERVICE_UNAVAILABLE, "engine"),
            ApiError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = self.status_and_kind();
        let body = ErrorResponse {
            error: ErrorBody {
                kind: kind.to_string(),
                message: self.to_string(),
            },
        };
        (status, Json(body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        match r {
            JsonRejection::JsonDataError(e) => ApiError::Validation(e.body_text()),
            other => ApiError::Malformed(other.body_text()),
        }
    }
}

impl From<RewardError> for ApiError {
    fn from(e: RewardError) -> Self {
        match e {
            RewardError::Compile(_) | RewardError::CompileUnavailable => ApiError::Engine(e.to_string()),
            RewardError::Config(_) => ApiError::Validation(e.to_string()),
            RewardError::NoTests => ApiError::Internal(e.to_string()),
        }
    }
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/reward", post(reward))
        .route("/v1/evaluate", post(evaluate))
        .with_state(state)
}

/// Serve until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, state: Arc<ServiceState>) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn health(State(state): State<Arc<ServiceState>>) -> Json<HealthResponse> {
    Json(HealthResponse {
        status: "ok".to_string(),
        api_version: API_VERSION,
        config_hash: state.config.hash(),
        corpus_fingerprint: state.corpus.fingerprint().to_string(),
        corpus_pages: state.corpus.len(),
        engine: state.engine(),
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(format!("worker task failed: {e}")))?
}

async fn reward(
    State(state): State<Arc<ServiceState>>,
    body: Result<Json<RewardRequest>, JsonRejection>,
) -> Result<Json<RewardResponse>, ApiError> {
    let Json(req) = body?;
    if req.completions.is_empty() {
        return Err(ApiError::Validation("completions must not be empty".into()));
    }
    if state.corpus.page(&req.doc_id, req.page_index).is_none() {
        return Err(ApiError::NotFound(format!(
            "no reference page {} of document {:?}",
            req.page_index, req.doc_id
        )));
    }
    let mut config = state.config.clone();
    if let Some(c) = req.overrides.compile_test {
        config.reward.compile_test = c;
    }
    if let Some(t) = req.overrides.thresholds.clone() {
        config.reward.thresholds = t;
    }
    let rcfg = config.reward_config();
    rcfg.validate().map_err(|e| ApiError::Validation(e.to_string()))?;
    if rcfg.compile_test && state.probe.is_none() {
        return Err(ApiError::Engine(
            "compile test requested but the service has no LaTeX engine".into(),
        ));
    }
    let metadata = state.metadata(config.hash());
    let results = blocking(move || {
        let reference = state.corpus.page(&req.doc_id, req.page_index).expect("checked above");
        let tests = instantiate_tests(reference, &rcfg);
        let page = |text: &String| texrecon::parse::RawPage::new(&req.doc_id, req.page_index, text.as_str());
        req.completions
            .par_iter()
            .map(|c| run_tests(&page(c), &tests, &rcfg, state.probe.as_ref()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(ApiError::from)
    })
    .await?;
    Ok(Json(RewardResponse { results, metadata }))
}

async fn evaluate(
    State(state): State<Arc<ServiceState>>,
    body: Result<Json<EvaluateRequest>, JsonRejection>,
) -> Result<Json<EvaluateResponse>, ApiError> {
    let Json(req) = body?;
    if req.pages.is_empty() {
        return Err(ApiError::Validation("pages must not be empty".into()));
    }
    if state.corpus.document(&req.doc_id).is_empty() {
        return Err(ApiError::NotFound(format!("no reference document {:?}", req.doc_id)));
    }
    if state.probe.is_none() {
        return Err(ApiError::Engine("evaluation needs a LaTeX engine for CSR".into()));
    }
    let metadata = state.metadata(state.config.hash());
    let report = blocking(move || {
        let records: Vec<EvalRecord> = req
            .pages
            .into_iter()
            .map(|p| EvalRecord {
                doc_id: req.doc_id.clone(),
                page_index: p.page_index,
                generated: p.text,
                reference: None,
                completion_index: 0,
            })
            .collect();
        let probe = state.probe.as_ref().expect("checked above");
        let mut report = run_evaluate(&records, Some(&state.corpus), &state.config, probe).map_err(|e| match e {
            RunError::Compile(_) => ApiError::Engine(e.to_string()),
            RunError::InvalidInput(_) => ApiError::Validation(e.to_string()),
            RunError::Pool(_) => ApiError::Internal(e.to_string()),
        })?;
        if let Some(err) = report.errors.pop() {
            return Err(ApiError::Validation(err.message));
        }
        report
            .documents
            .pop()
            .ok_or_else(|| ApiError::Internal("document was not scored".into()))
    })
    .await?;
    Ok(Json(EvaluateResponse { report, metadata }))
}
