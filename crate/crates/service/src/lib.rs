//! HTTP API over a compliance data directory.
//!
//! All routes live under `/v1`. Successful responses carry the same JSON
//! documents the engine produces (`application/json`), except the cube
//! export which is Turtle. Every other outcome is a single [`ApiError`]
//! object.

mod error;

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use compliance_core::assessment::parse_assessment;
use compliance_core::checklist::parse_checklist;
use compliance_core::cube::{serialize_turtle, CubeGraph};
use compliance_core::period::Period;
use compliance_core::store::{Registration, Store};
use compliance_core::trend::{benchmark, benchmark_json};
use compliance_core::validation::is_identifier;
use serde::Serialize;

pub use error::ApiError;

/// Environment variable holding the optional bearer token.
pub const TOKEN_ENV: &str = "COMPLIANCE_TOKEN";

const MAX_BODY: usize = 1 << 20;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Prefix for IRIs minted by the cube export.
    pub base_iri: String,
    /// When set, every request must carry `Authorization: Bearer <token>`.
    pub token: Option<String>,
}

impl ServiceConfig {
    /// Reads the token from [`TOKEN_ENV`]; an empty value disables auth.
    pub fn from_env(base_iri: impl Into<String>) -> Self {
        Self {
            base_iri: base_iri.into(),
            token: std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
        }
    }
}

#[derive(Clone)]
struct AppState {
    store: Arc<Store>,
    config: Arc<ServiceConfig>,
}

type ApiResult = Result<Response, ApiError>;

/// Builds the router. Fails if the configured base IRI is unusable.
pub fn router(store: Arc<Store>, config: ServiceConfig) -> Result<Router, compliance_core::Error> {
    CubeGraph::new(&config.base_iri)?;
    let state = AppState {
        store,
        config: Arc::new(config),
    };
    Ok(Router::new()
        .route("/v1/checklists", get(list_checklists))
        .route("/v1/checklists/{id}/{version}", get(get_checklist).put(put_checklist))
        .route("/v1/orgs/{org}/assessments", axum::routing::post(post_assessment))
        .route("/v1/orgs/{org}/assessments/{period}", get(get_assessment))
        .route("/v1/orgs/{org}/report/{period}", get(get_report))
        .route("/v1/orgs/{org}/trend", get(get_trend))
        .route("/v1/orgs/{org}/cube.ttl", get(get_cube))
        .route("/v1/benchmark", get(get_benchmark))
        .fallback(|| async { ApiError::not_found("no such resource") })
        .layer(middleware::from_fn_with_state(state.clone(), require_token))
        .layer(middleware::from_fn(normalize_errors))
        .layer(axum::extract::DefaultBodyLimit::max(MAX_BODY))
        .with_state(state))
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn json(status: StatusCode, body: String) -> Response {
    let mut response = (status, body).into_response();
    response
        .headers_mut()
        .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    response
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("response documents serialize infallibly");
    out.push('\n');
    out
}

fn check_org(org: &str) -> Result<(), ApiError> {
    if is_identifier(org) {
        Ok(())
    } else {
        Err(ApiError::bad_request("bad-org-id", format!("invalid organisation id {org:?}")))
    }
}

fn parse_period(s: &str) -> Result<Period, ApiError> {
    s.parse::<Period>().map_err(ApiError::from)
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> compliance_core::Result<T> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("write task failed: {e}")))?
        .map_err(ApiError::from)
}

#[derive(Serialize)]
struct ChecklistSummary<'a> {
    id: &'a str,
    version: &'a str,
    jurisdiction: &'a str,
    title: &'a str,
    section_count: usize,
    question_count: usize,
}

#[derive(Serialize)]
struct ChecklistIndex<'a> {
    checklists: Vec<ChecklistSummary<'a>>,
}

async fn list_checklists(State(app): State<AppState>) -> Response {
    let snapshot = app.store.snapshot();
    let index = ChecklistIndex {
        checklists: snapshot
            .checklists()
            .map(|c| ChecklistSummary {
                id: &c.id,
                version: &c.version,
                jurisdiction: &c.jurisdiction,
                title: &c.title,
                section_count: c.sections.len(),
                question_count: c.question_count(),
            })
            .collect(),
    };
    json(StatusCode::OK, pretty(&index))
}

async fn get_checklist(State(app): State<AppState>, Path((id, version)): Path<(String, String)>) -> ApiResult {
    let snapshot = app.store.snapshot();
    let checklist = snapshot
        .checklist(&id, &version)
        .ok_or_else(|| ApiError::not_found(format!("checklist {id}@{version} is not registered")))?;
    Ok(json(StatusCode::OK, checklist.to_canonical_json()))
}

#[derive(Serialize)]
struct Registered {
    id: String,
    version: String,
    created: bool,
}

async fn put_checklist(
    State(app): State<AppState>,
    Path((id, version)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult {
    let checklist = parse_checklist(&body)?;
    if checklist.id != id || checklist.version != version {
        return Err(ApiError::bad_request(
            "path-mismatch",
            format!(
                "document is {} but was sent to {id}@{version}",
                checklist.key()
            ),
        ));
    }
    let store = Arc::clone(&app.store);
    let outcome = blocking(move || store.register_checklist(&checklist)).await?;
    let created = outcome == Registration::Created;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok(json(status, pretty(&Registered { id, version, created })))
}

async fn post_assessment(State(app): State<AppState>, Path(org): Path<String>, body: Bytes) -> ApiResult {
    check_org(&org)?;
    let assessment = parse_assessment(&body)?;
    if assessment.org_id != org {
        return Err(ApiError::bad_request(
            "org-mismatch",
            format!("document is for {:?} but was sent to {org:?}", assessment.org_id),
        ));
    }
    let location = format!("/v1/orgs/{org}/assessments/{}", assessment.period);
    let store = Arc::clone(&app.store);
    let revision = blocking(move || store.submit_assessment(assessment)).await?;
    let mut response = json(StatusCode::CREATED, serde_json::json!({ "revision": revision }).to_string());
    if let Ok(value) = HeaderValue::from_str(&location) {
        response.headers_mut().insert(header::LOCATION, value);
    }
    Ok(response)
}

async fn get_assessment(State(app): State<AppState>, Path((org, period)): Path<(String, String)>) -> ApiResult {
    check_org(&org)?;
    let period = parse_period(&period)?;
    let snapshot = app.store.snapshot();
    let record = snapshot
        .latest(&org, period)
        .ok_or_else(|| ApiError::not_found(format!("no assessment for {org} in {period}")))?;
    let mut response = json(StatusCode::OK, record.assessment.to_canonical_json());
    response
        .headers_mut()
        .insert("x-revision", HeaderValue::from(record.revision));
    Ok(response)
}

async fn get_report(State(app): State<AppState>, Path((org, period)): Path<(String, String)>) -> ApiResult {
    check_org(&org)?;
    let period = parse_period(&period)?;
    let report = app.store.snapshot().report(&org, period)?;
    Ok(json(StatusCode::OK, report.to_json()))
}

async fn get_trend(State(app): State<AppState>, Path(org): Path<String>) -> ApiResult {
    check_org(&org)?;
    let series = app.store.snapshot().trend(&org)?;
    Ok(json(StatusCode::OK, series.to_json()))
}

async fn get_benchmark(State(app): State<AppState>, Query(query): Query<HashMap<String, String>>) -> ApiResult {
    let orgs: Vec<String> = query
        .get("orgs")
        .map(|list| {
            list.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect()
        })
        .unwrap_or_default();
    if orgs.is_empty() {
        return Err(ApiError::bad_request(
            "missing-orgs",
            "query parameter orgs must list at least one organisation",
        ));
    }
    for org in &orgs {
        check_org(org)?;
    }
    let rows = benchmark(&orgs, &app.store.snapshot())?;
    Ok(json(StatusCode::OK, benchmark_json(&rows)))
}

async fn get_cube(State(app): State<AppState>, Path(org): Path<String>) -> ApiResult {
    check_org(&org)?;
    let cube = app.store.snapshot().cube(&org, &app.config.base_iri)?;
    let mut response = serialize_turtle(&cube).into_response();
    response.headers_mut().insert(
        header::CONTENT_TYPE,
        HeaderValue::from_static("text/turtle; charset=utf-8"),
    );
    Ok(response)
}

fn bearer_matches(headers: &HeaderMap, token: &str) -> bool {
    let Some(presented) = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
    else {
        return false;
    };
    let (a, b) = (presented.as_bytes(), token.as_bytes());
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

async fn require_token(State(app): State<AppState>, request: Request, next: Next) -> Response {
    match &app.config.token {
        Some(token) if !bearer_matches(request.headers(), token) => {
            ApiError::new(StatusCode::UNAUTHORIZED, "unauthorized", "missing or invalid bearer token").into_response()
        }
        _ => next.run(request).await,
    }
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"))
}

/// Rewrites framework-generated failures (bad path encoding, oversized
/// bodies, wrong methods) into [`ApiError`] bodies.
async fn normalize_errors(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_owned();
    let response = next.run(request).await;
    let status = response.status();
    tracing::info!(%method, %path, status = status.as_u16());
    if status.is_success() || is_json(response.headers()) {
        return response;
    }
    let (parts, body) = response.into_parts();
    let text = axum::body::to_bytes(body, MAX_BODY).await.unwrap_or_default();
    let mut rewritten = ApiError::from_status(status, String::from_utf8_lossy(&text)).into_response();
    if let Some(allow) = parts.headers.get(header::ALLOW) {
        rewritten.headers_mut().insert(header::ALLOW, allow.clone());
    }
    rewritten
}
