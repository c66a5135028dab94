//! HTTP JSON API over the codebook and the ontology labeling.
//!
//! | method | path              | body / query                                   |
//! |--------|-------------------|------------------------------------------------|
//! | GET    | `/health`         |                                                |
//! | GET    | `/candidates`     | `status`, `arity`, `q`, `page` (from 1)        |
//! | POST   | `/decisions`      | `{term, coder_id, round, verdict, comment}`    |
//! | GET    | `/discrepancies`  |                                                |
//! | POST   | `/rounds/resolve` | `{resolutions: [{term, verdict, note}], note}` |
//! | GET    | `/progress`       |                                                |
//! | GET    | `/labeling`       |                                                |
//! | POST   | `/labeling`       | `{term, labels}`                               |
//!
//! `status` is one of `valid`, `invalid`, `unresolved`, `undecided`,
//! `discrepancy`. Errors are `{error, detail}`. When a token is configured,
//! every request must carry it in `x-segforms-token`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use segforms::codebook::{Codebook, CodingDecision, Consensus, Resolution, Verdict};
use segforms::extract::NGramCandidate;
use segforms::ontology::{LabelingFile, MAX_LABELS};

use crate::run::write_file;

pub const TOKEN_HEADER: &str = "x-segforms-token";

/// Labels edited through the API, persisted as a labeling CSV.
#[derive(Debug, Clone, Default)]
pub struct LabelingStore {
    pub file: LabelingFile,
    /// Cluster of each form, when the ontology step has run.
    pub clusters: BTreeMap<String, usize>,
    pub path: Option<PathBuf>,
}

impl LabelingStore {
    fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        let mut header = vec!["form".to_string()];
        header.extend((1..=MAX_LABELS).map(|i| format!("label{i}")));
        w.write_record(&header).expect("in-memory write");
        for (id, label) in &self.file.clusters {
            w.write_record([format!("{}{id}", segforms::ontology::CLUSTER_PREFIX), label.clone()])
                .expect("in-memory write");
        }
        for (term, labels) in &self.file.forms {
            let mut row = vec![term.clone()];
            row.extend(labels.iter().cloned());
            w.write_record(&row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory write")
    }
}

struct Inner {
    codebook: Codebook,
    labeling: LabelingStore,
}

#[derive(Clone)]
pub struct AppState {
    candidates: Arc<Vec<NGramCandidate>>,
    inner: Arc<Mutex<Inner>>,
    token: Option<Arc<str>>,
    page_size: usize,
}

impl AppState {
    pub fn new(
        candidates: Vec<NGramCandidate>,
        codebook: Codebook,
        labeling: LabelingStore,
        token: Option<String>,
        page_size: usize,
    ) -> Self {
        AppState {
            candidates: Arc::new(candidates),
            inner: Arc::new(Mutex::new(Inner { codebook, labeling })),
            token: token.map(Into::into),
            page_size: page_size.max(1),
        }
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        // a panic mid-request cannot leave the state half-applied: writes hit
        // the journal first and the state after, so keep serving
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }
}

pub struct ApiError {
    status: StatusCode,
    error: &'static str,
    detail: Value,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, detail: impl Into<Value>) -> Self {
        ApiError {
            status,
            error,
            detail: detail.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.error, "detail": self.detail }))).into_response()
    }
}

impl From<segforms::Error> for ApiError {
    fn from(e: segforms::Error) -> Self {
        use segforms::Error as E;
        let detail = e.to_string();
        match e {
            E::UnknownCandidate(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_candidate", detail),
            E::RoundNotOpen { .. } => ApiError::new(StatusCode::CONFLICT, "round_not_open", detail),
            E::UnaddressedDiscrepancies(terms) => {
                ApiError::new(StatusCode::CONFLICT, "unaddressed_discrepancies", json!(terms))
            }
            E::InvalidVerdict(_) | E::InvalidArgument(_) | E::Labeling(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", detail)
            }
            _ => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", detail),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), "bad_body", r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_query", r.body_text())
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn require_token(State(state): State<AppState>, req: Request, next: Next) -> Response {
    if let Some(token) = &state.token {
        let given = req.headers().get(TOKEN_HEADER).and_then(|v| v.to_str().ok());
        if given != Some(token.as_ref()) {
            return ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", format!("missing or wrong {TOKEN_HEADER}"))
                .into_response();
        }
    }
    next.run(req).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/candidates", get(list_candidates))
        .route("/decisions", post(post_decision))
        .route("/discrepancies", get(discrepancies))
        .route("/rounds/resolve", post(resolve_round))
        .route("/progress", get(progress))
        .route("/labeling", get(get_labeling).post(post_labeling))
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state)
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok", "version": env!("CARGO_PKG_VERSION") }))
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum StatusFilter {
    Valid,
    Invalid,
    Unresolved,
    Undecided,
    Discrepancy,
    #[default]
    #[serde(rename = "")]
    Any,
}

#[derive(Debug, Deserialize)]
struct CandidateQuery {
    #[serde(default)]
    status: StatusFilter,
    arity: Option<u8>,
    q: Option<String>,
    page: Option<usize>,
}

#[derive(Debug, Serialize)]
struct CandidateView {
    term: String,
    arity: u8,
    n_docs: usize,
    n_occurrences: usize,
    first_year: i32,
    consensus: Consensus,
    verdicts: BTreeMap<String, Verdict>,
    discrepancy: bool,
}

async fn list_candidates(
    State(state): State<AppState>,
    query: Result<Query<CandidateQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let Query(query) = query?;
    let page = query.page.unwrap_or(1);
    if page == 0 {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "bad_query", "page starts at 1"));
    }
    let needle = query.q.as_deref().map(str::to_lowercase).filter(|q| !q.is_empty());
    let inner = state.lock();
    let vs = inner.codebook.state();
    let conflicts: BTreeSet<String> = vs.detect_discrepancies().into_iter().collect();
    let matching: Vec<CandidateView> = state
        .candidates
        .iter()
        .filter(|c| query.arity.is_none_or(|a| c.arity == a))
        .map(|c| {
            let term = c.term();
            let verdicts = vs
                .candidate(&term)
                .map(|s| s.latest.iter().map(|(k, v)| (k.clone(), v.verdict)).collect())
                .unwrap_or_default();
            CandidateView {
                consensus: vs.consensus(&term),
                discrepancy: conflicts.contains(&term),
                arity: c.arity,
                n_docs: c.n_docs(),
                n_occurrences: c.n_occurrences(),
                first_year: c.first_year,
                verdicts,
                term,
            }
        })
        .filter(|v| needle.as_deref().is_none_or(|q| v.term.contains(q)))
        .filter(|v| match query.status {
            StatusFilter::Any => true,
            StatusFilter::Valid => v.consensus == Consensus::Valid,
            StatusFilter::Invalid => v.consensus == Consensus::Invalid,
            StatusFilter::Unresolved => v.consensus == Consensus::Unresolved,
            StatusFilter::Undecided => v.verdicts.is_empty() && v.consensus == Consensus::Unresolved,
            StatusFilter::Discrepancy => v.discrepancy,
        })
        .collect();
    let total = matching.len();
    let items: Vec<CandidateView> = matching
        .into_iter()
        .skip((page - 1) * state.page_size)
        .take(state.page_size)
        .collect();
    Ok(Json(json!({
        "total": total,
        "page": page,
        "page_size": state.page_size,
        "round": vs.current_round(),
        "items": items,
    })))
}

#[derive(Debug, Deserialize)]
struct DecisionBody {
    term: String,
    coder_id: String,
    round: Option<u32>,
    verdict: Verdict,
    #[serde(default)]
    comment: String,
    timestamp: Option<DateTime<Utc>>,
}

async fn post_decision(
    State(state): State<AppState>,
    body: Result<Json<DecisionBody>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let Json(body) = body?;
    let mut inner = state.lock();
    let round = body.round.unwrap_or_else(|| inner.codebook.state().current_round());
    let term = body.term.clone();
    inner.codebook.record_decision(CodingDecision {
        term: body.term,
        coder_id: body.coder_id,
        round,
        verdict: body.verdict,
        comment: body.comment,
        timestamp: body.timestamp.unwrap_or_else(Utc::now),
    })?;
    let consensus = inner.codebook.state().consensus(&term);
    Ok((StatusCode::CREATED, Json(json!({ "term": term, "round": round, "consensus": consensus }))))
}

async fn discrepancies(State(state): State<AppState>) -> Json<Value> {
    let inner = state.lock();
    let vs = inner.codebook.state();
    let items: Vec<Value> = vs
        .detect_discrepancies()
        .into_iter()
        .map(|term| {
            let verdicts: BTreeMap<&str, Verdict> = vs
                .candidate(&term)
                .map(|c| c.latest.iter().map(|(k, v)| (k.as_str(), v.verdict)).collect())
                .unwrap_or_default();
            json!({ "term": term, "verdicts": verdicts })
        })
        .collect();
    Json(json!({ "round": vs.current_round(), "items": items }))
}

#[derive(Debug, Deserialize)]
struct ResolveBody {
    resolutions: Vec<Resolution>,
    #[serde(default)]
    note: String,
}

async fn resolve_round(
    State(state): State<AppState>,
    body: Result<Json<ResolveBody>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(body) = body?;
    let mut inner = state.lock();
    let version = inner.codebook.resolve_round(&body.resolutions, &body.note)?;
    Ok(Json(json!({
        "codebook_version": version,
        "round": inner.codebook.state().current_round(),
    })))
}

async fn progress(State(state): State<AppState>) -> Json<Value> {
    let inner = state.lock();
    Json(serde_json::to_value(inner.codebook.state().progress()).expect("progress serializes"))
}

async fn get_labeling(State(state): State<AppState>) -> Json<Value> {
    let inner = state.lock();
    let l = &inner.labeling;
    Json(json!({
        "max_labels": MAX_LABELS,
        "forms": l.file.forms,
        "cluster_labels": l.file.clusters,
        "clusters": l.clusters,
    }))
}

#[derive(Debug, Deserialize)]
struct LabelBody {
    term: String,
    labels: Vec<String>,
}

async fn post_labeling(
    State(state): State<AppState>,
    body: Result<Json<LabelBody>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(body) = body?;
    let labels: Vec<String> = body
        .labels
        .iter()
        .map(|l| l.trim().to_owned())
        .filter(|l| !l.is_empty())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.is_empty() || labels.len() > MAX_LABELS {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "invalid_request",
            format!("a form takes 1 to {MAX_LABELS} distinct labels, got {}", labels.len()),
        ));
    }
    if !state.candidates.iter().any(|c| c.term() == body.term) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "unknown_candidate", body.term));
    }
    let mut inner = state.lock();
    let mut next = inner.labeling.clone();
    next.file.forms.insert(body.term.clone(), labels.clone());
    if let Some(path) = &next.path {
        write_file(path, &next.to_csv())
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    }
    inner.labeling = next;
    Ok(Json(json!({ "term": body.term, "labels": labels })))
}
