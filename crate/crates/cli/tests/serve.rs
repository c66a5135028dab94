use std::path::{Path, PathBuf};

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use tower::ServiceExt;

use segforms_cli::config::PipelineConfig;
use segforms_cli::{app_state, pipeline, serve};

fn prepared(dir: &Path, token: Option<&str>) -> PipelineConfig {
    let mut config = PipelineConfig::default();
    config.paths.corpus = Some(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/extraction/corpus.csv"),
    );
    config.paths.out = dir.join("out");
    config.serve.token = token.map(str::to_owned);
    config.serve.page_size = 5;
    pipeline::ingest(&config).unwrap();
    pipeline::extract(&config).unwrap();
    config
}

fn app(config: &PipelineConfig) -> Router {
    serve::router(app_state(config).unwrap())
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn decision(term: &str, coder: &str, verdict: &str) -> Value {
    json!({ "term": term, "coder_id": coder, "round": 1, "verdict": verdict, "comment": "" })
}

fn journal_lines(config: &PipelineConfig) -> usize {
    std::fs::read_to_string(config.journal_path()).map(|t| t.lines().count()).unwrap_or(0)
}

#[tokio::test]
async fn health_and_candidate_listing() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(&prepared(dir.path(), None));
    let (status, body) = call(&app, Method::GET, "/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");

    let (_, page1) = call(&app, Method::GET, "/candidates", None).await;
    assert_eq!(page1["total"], 20);
    assert_eq!(page1["items"].as_array().unwrap().len(), 5);
    let (_, page4) = call(&app, Method::GET, "/candidates?page=4", None).await;
    assert_eq!(page4["items"].as_array().unwrap().len(), 5);
    assert_ne!(page1["items"][0]["term"], page4["items"][0]["term"]);

    let (_, tri) = call(&app, Method::GET, "/candidates?arity=3", None).await;
    assert_eq!(tri["total"], 8);
    let (_, hits) = call(&app, Method::GET, "/candidates?q=racial", None).await;
    assert_eq!(hits["total"], 4);
    let (_, undecided) = call(&app, Method::GET, "/candidates?status=undecided", None).await;
    assert_eq!(undecided["total"], 20);

    let (status, err) = call(&app, Method::GET, "/candidates?status=bogus", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["error"], "bad_query");
    assert!(err["detail"].is_string());
}

#[tokio::test]
async fn decisions_discrepancies_and_rounds() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path(), None);
    let app = app(&config);
    for (term, coder, verdict) in [
        ("gender segregation", "ana", "valid"),
        ("gender segregation", "ben", "valid"),
        ("school segregation", "ana", "valid"),
        ("school segregation", "ben", "invalid"),
        ("self segregation", "ana", "discuss"),
    ] {
        let (status, body) = call(&app, Method::POST, "/decisions", Some(decision(term, coder, verdict))).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
    }
    let (_, valid) = call(&app, Method::GET, "/candidates?status=valid", None).await;
    assert_eq!(valid["items"][0]["term"], "gender segregation");

    let (_, conflicts) = call(&app, Method::GET, "/discrepancies", None).await;
    let terms: Vec<&str> = conflicts["items"].as_array().unwrap().iter().map(|i| i["term"].as_str().unwrap()).collect();
    assert_eq!(terms, ["school segregation", "self segregation"]);
    assert_eq!(conflicts["items"][0]["verdicts"]["ben"], "invalid");

    let (status, err) = call(&app, Method::POST, "/rounds/resolve", Some(json!({ "resolutions": [] }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["detail"], json!(["school segregation", "self segregation"]));

    let body = json!({
        "resolutions": [
            { "term": "school segregation", "verdict": "valid", "note": "agreed" },
            { "term": "self segregation", "verdict": null }
        ],
        "note": "round one"
    });
    let (status, done) = call(&app, Method::POST, "/rounds/resolve", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(done["codebook_version"], 2);
    assert_eq!(done["round"], 2);

    let (status, err) = call(&app, Method::POST, "/decisions", Some(decision("urban segregation", "ana", "valid"))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["error"], "round_not_open");

    let (_, progress) = call(&app, Method::GET, "/progress", None).await;
    assert_eq!(progress["current_round"], 2);
    assert_eq!(progress["consensus"]["valid"], 2);
    assert_eq!(journal_lines(&config), 5 + 3);
}

#[tokio::test]
async fn bad_requests_get_error_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path(), None);
    let app = app(&config);
    let (status, err) = call(&app, Method::POST, "/decisions", Some(decision("no such segregation", "ana", "valid"))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["error"], "unknown_candidate");
    let (status, err) = call(&app, Method::POST, "/decisions", Some(decision("gender segregation", "ana", "maybe"))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(err["error"], "bad_body");
    let (status, _) = call(&app, Method::POST, "/decisions", Some(decision("gender segregation", " ", "valid"))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(journal_lines(&config), 0);
}

#[tokio::test]
async fn concurrent_decisions_all_reach_the_journal() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path(), None);
    let app = app(&config);
    let (_, list) = call(&app, Method::GET, "/candidates?page=1", None).await;
    let terms: Vec<String> = list["items"].as_array().unwrap().iter().map(|i| i["term"].as_str().unwrap().to_owned()).collect();
    let mut tasks = Vec::new();
    for i in 0..10 {
        let app = app.clone();
        let body = decision(&terms[i % terms.len()], &format!("coder{}", i / 5), "valid");
        tasks.push(tokio::spawn(async move { call(&app, Method::POST, "/decisions", Some(body)).await.0 }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::CREATED);
    }
    assert_eq!(journal_lines(&config), 10);
    // a restarted server sees the same state
    let (_, before) = call(&app, Method::GET, "/progress", None).await;
    let (_, after) = call(&self::app(&config), Method::GET, "/progress", None).await;
    assert_eq!(before, after);
    assert_eq!(after["consensus"]["valid"], 5);
}

#[tokio::test]
async fn labeling_edits_are_bounded_and_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path(), None);
    let app = app(&config);
    let ok = json!({ "term": "urban segregation", "labels": ["Spatial", "Urban", "Spatial"] });
    let (status, body) = call(&app, Method::POST, "/labeling", Some(ok)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["labels"], json!(["Spatial", "Urban"]));

    let nine: Vec<String> = (0..9).map(|i| format!("T{i}")).collect();
    let (status, err) = call(&app, Method::POST, "/labeling", Some(json!({ "term": "urban segregation", "labels": nine }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(err["detail"].as_str().unwrap().contains("1 to 8"));
    let (status, _) = call(&app, Method::POST, "/labeling", Some(json!({ "term": "urban segregation", "labels": [] }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, Method::POST, "/labeling", Some(json!({ "term": "nope", "labels": ["X"] }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (_, state) = call(&app, Method::GET, "/labeling", None).await;
    assert_eq!(state["max_labels"], 8);
    assert_eq!(state["forms"]["urban segregation"], json!(["Spatial", "Urban"]));
    let saved: PathBuf = config.paths.out.join("labeling.csv");
    let text = std::fs::read_to_string(&saved).unwrap();
    assert!(text.contains("urban segregation,Spatial,Urban"));
    // the saved file feeds the ontology step unchanged
    let file = segforms::ontology::LabelingFile::read(text.as_bytes()).unwrap();
    assert_eq!(file.forms.len(), 1);
}

#[tokio::test]
async fn shared_token_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let config = prepared(dir.path(), Some("s3cret"));
    let app = app(&config);
    let (status, err) = call(&app, Method::GET, "/progress", None).await;
    assert_eq!(status, StatusCode::UNAUTHORIZED);
    assert_eq!(err["error"], "unauthorized");
    let req = Request::get("/progress").header(serve::TOKEN_HEADER, "s3cret").body(Body::empty()).unwrap();
    assert_eq!(app.clone().oneshot(req).await.unwrap().status(), StatusCode::OK);
}
