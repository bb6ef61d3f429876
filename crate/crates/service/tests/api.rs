use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, HeaderMap, Request, StatusCode};
use axum::Router;
use compliance_core::assessment::{AnswerStatus, Assessment};
use compliance_core::checklist::{default_checklist, DEFAULT_CHECKLIST_JSON};
use compliance_core::cube::check_cube;
use compliance_core::scoring::score_assessment;
use compliance_core::store::{Store, JOURNAL_FILE};
use compliance_service::{router, ServiceConfig};
use compliance_testkit::fixtures::{period, six_month_assessments, table2_assessment, SIX_MONTHS};
use compliance_testkit::rdf::parse_turtle;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

const BASE: &str = "https://compliance.example.org/gdpr";

struct Reply {
    status: StatusCode,
    headers: HeaderMap,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.text()))
    }

    fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }

    fn code(&self) -> String {
        self.json()["code"].as_str().unwrap().to_owned()
    }
}

fn app_with(dir: &std::path::Path, token: Option<&str>) -> (Arc<Store>, Router) {
    let store = Arc::new(Store::open(dir).unwrap());
    let config = ServiceConfig {
        base_iri: BASE.to_owned(),
        token: token.map(str::to_owned),
    };
    (Arc::clone(&store), router(store, config).unwrap())
}

async fn call_with(app: &Router, method: &str, uri: &str, body: Option<Vec<u8>>, auth: Option<&str>) -> Reply {
    let mut request = Request::builder().method(method).uri(uri);
    if let Some(token) = auth {
        request = request.header(header::AUTHORIZATION, format!("Bearer {token}"));
    }
    let request = request.body(body.map_or_else(Body::empty, Body::from)).unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let headers = response.headers().clone();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    let reply = Reply { status, headers, body };
    if !status.is_success() {
        // every failure is exactly one ApiError object
        let v = reply.json();
        let keys: BTreeSet<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert!(keys.is_subset(&BTreeSet::from(["status", "code", "message", "details"])), "{v}");
        assert_eq!(v["status"].as_u64(), Some(u64::from(status.as_u16())), "{v}");
        assert!(v["code"].is_string() && v["message"].is_string(), "{v}");
        assert!(reply.headers[header::CONTENT_TYPE].to_str().unwrap().starts_with("application/json"));
    }
    reply
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Vec<u8>>) -> Reply {
    call_with(app, method, uri, body, None).await
}

async fn put_default(app: &Router) -> Reply {
    let c = default_checklist();
    call(
        app,
        "PUT",
        &format!("/v1/checklists/{}/{}", c.id, c.version),
        Some(DEFAULT_CHECKLIST_JSON.as_bytes().to_vec()),
    )
    .await
}

async fn submit(app: &Router, a: &Assessment) -> Reply {
    call(
        app,
        "POST",
        &format!("/v1/orgs/{}/assessments", a.org_id),
        Some(a.to_canonical_json().into_bytes()),
    )
    .await
}

#[tokio::test]
async fn checklist_registration() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app_with(dir.path(), None);
    let c = default_checklist();

    assert_eq!(put_default(&app).await.status, StatusCode::CREATED);
    let again = put_default(&app).await;
    assert_eq!(again.status, StatusCode::OK);
    assert_eq!(again.json()["created"], false);

    let fetched = call(&app, "GET", &format!("/v1/checklists/{}/{}", c.id, c.version), None).await;
    assert_eq!(fetched.status, StatusCode::OK);
    assert_eq!(fetched.text(), DEFAULT_CHECKLIST_JSON);

    let list = call(&app, "GET", "/v1/checklists", None).await.json();
    assert_eq!(list["checklists"][0]["question_count"], 54);
    assert_eq!(list["checklists"][0]["section_count"], 8);

    let mut altered = c.clone();
    altered.sections[0].questions[0].text.push_str(" (revised)");
    let uri = format!("/v1/checklists/{}/{}", c.id, c.version);
    let conflict = call(&app, "PUT", &uri, Some(altered.to_canonical_json().into_bytes())).await;
    assert_eq!((conflict.status, conflict.code().as_str()), (StatusCode::CONFLICT, "version-conflict"));

    altered.version = "1.1.0".into();
    let mismatch = call(&app, "PUT", &uri, Some(altered.to_canonical_json().into_bytes())).await;
    assert_eq!((mismatch.status, mismatch.code().as_str()), (StatusCode::BAD_REQUEST, "path-mismatch"));
    let newer = call(
        &app,
        "PUT",
        &format!("/v1/checklists/{}/1.1.0", c.id),
        Some(altered.to_canonical_json().into_bytes()),
    )
    .await;
    assert_eq!(newer.status, StatusCode::CREATED);
    assert_eq!(call(&app, "GET", "/v1/checklists", None).await.json()["checklists"].as_array().unwrap().len(), 2);

    let mut duplicated = c.clone();
    duplicated.sections[1].questions[1].id = "pd-1".into();
    let invalid = call(&app, "PUT", &format!("/v1/checklists/{}/9", c.id), Some({
        duplicated.version = "9".into();
        duplicated.to_canonical_json().into_bytes()
    }))
    .await;
    assert_eq!(invalid.code(), "duplicate-question-id");
    assert_eq!(invalid.json()["details"][0]["path"], "sections[1].questions[1].id");

    let missing = call(&app, "GET", "/v1/checklists/nope/1", None).await;
    assert_eq!(missing.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn submissions_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (store, app) = app_with(dir.path(), None);
    put_default(&app).await;
    let c = default_checklist();
    let a = table2_assessment(&c, "orgA", period("2019-01"));

    let first = submit(&app, &a).await;
    assert_eq!(first.status, StatusCode::CREATED);
    assert_eq!(first.text(), r#"{"revision":1}"#);
    assert_eq!(first.headers[header::LOCATION], "/v1/orgs/orgA/assessments/2019-01");
    assert_eq!(submit(&app, &a).await.json()["revision"], 2);

    let report = call(&app, "GET", "/v1/orgs/orgA/report/2019-01", None).await;
    assert_eq!(report.status, StatusCode::OK);
    assert_eq!(report.text(), score_assessment(&a, &c).unwrap().to_json());
    let percents: Vec<u64> = report.json()["sections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["percent"].as_u64().unwrap())
        .collect();
    assert_eq!(percents, [67, 40, 100, 100, 83, 100, 50, 100]);

    let stored = call(&app, "GET", "/v1/orgs/orgA/assessments/2019-01", None).await;
    assert_eq!(stored.text(), a.to_canonical_json());
    assert_eq!(stored.headers["x-revision"], "2");
    assert_eq!(store.load_latest("orgA", period("2019-01")).unwrap(), a);

    for (uri, status, code) in [
        ("/v1/orgs/orgA/report/2019-02", StatusCode::NOT_FOUND, "not-found"),
        ("/v1/orgs/orgA/report/2019-13", StatusCode::BAD_REQUEST, "bad-period"),
        ("/v1/orgs/orgZ/assessments/2019-01", StatusCode::NOT_FOUND, "not-found"),
        ("/v1/orgs/org%20A/trend", StatusCode::BAD_REQUEST, "bad-org-id"),
        ("/v1/nowhere", StatusCode::NOT_FOUND, "not-found"),
    ] {
        let reply = call(&app, "GET", uri, None).await;
        assert_eq!((reply.status, reply.code().as_str()), (status, code), "{uri}");
    }
}

#[tokio::test]
async fn submission_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app_with(dir.path(), None);
    put_default(&app).await;
    let c = default_checklist();
    let mut a = table2_assessment(&c, "orgA", period("2019-01"));

    let wrong_org = call(&app, "POST", "/v1/orgs/orgB/assessments", Some(a.to_canonical_json().into_bytes())).await;
    assert_eq!(wrong_org.code(), "org-mismatch");

    let garbage = call(&app, "POST", "/v1/orgs/orgA/assessments", Some(b"{\"org_id\":".to_vec())).await;
    assert_eq!((garbage.status, garbage.code().as_str()), (StatusCode::BAD_REQUEST, "syntax"));

    let bad_status = a.to_canonical_json().replacen("\"non_compliant\"", "\"partial\"", 1);
    let reply = call(&app, "POST", "/v1/orgs/orgA/assessments", Some(bad_status.into_bytes())).await;
    assert_eq!(reply.code(), "bad-status");
    assert!(reply.json()["details"][0]["path"].as_str().unwrap().starts_with("answers["));

    let dropped = a.answers.remove(7);
    let reply = submit(&app, &a).await;
    assert_eq!((reply.status, reply.code().as_str()), (StatusCode::BAD_REQUEST, "missing-answer"));
    let details = reply.json()["details"].as_array().unwrap().clone();
    assert_eq!(details.len(), 1);
    assert_eq!(details[0]["question_id"], dropped.question_id.as_str());

    a.answers.push(dropped);
    a.checklist_version = "7.0".into();
    let reply = submit(&app, &a).await;
    assert_eq!(reply.code(), "unknown-checklist");

    let wrong_method = call(&app, "DELETE", "/v1/checklists", None).await;
    assert_eq!((wrong_method.status, wrong_method.code().as_str()), (StatusCode::METHOD_NOT_ALLOWED, "method-not-allowed"));
    let wrong_method = call(&app, "GET", "/v1/orgs/orgA/assessments", None).await;
    assert_eq!(wrong_method.status, StatusCode::METHOD_NOT_ALLOWED);
}

#[tokio::test]
async fn trend_benchmark_and_cube() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app_with(dir.path(), None);
    put_default(&app).await;
    let c = default_checklist();
    for a in six_month_assessments(&c, "orgA").iter().rev() {
        assert_eq!(submit(&app, a).await.status, StatusCode::CREATED);
    }
    let mut b = table2_assessment(&c, "orgB", period("2019-03"));
    for answer in &mut b.answers {
        answer.status = AnswerStatus::Compliant;
    }
    submit(&app, &b).await;

    let trend = call(&app, "GET", "/v1/orgs/orgA/trend", None).await.json();
    let periods: Vec<&str> = trend["points"].as_array().unwrap().iter().map(|p| p["period"].as_str().unwrap()).collect();
    assert_eq!(periods, SIX_MONTHS);
    assert_eq!(trend["checklist_id"], c.id.as_str());

    let empty = call(&app, "GET", "/v1/orgs/orgQ/trend", None).await;
    assert_eq!(empty.status, StatusCode::OK);
    assert_eq!(empty.json()["points"].as_array().unwrap().len(), 0);

    let bench = call(&app, "GET", "/v1/benchmark?orgs=orgQ,orgA,orgB", None).await.json();
    let order: Vec<&str> = bench["rows"].as_array().unwrap().iter().map(|r| r["org_id"].as_str().unwrap()).collect();
    assert_eq!(order, ["orgB", "orgA", "orgQ"]);
    assert!(bench["rows"][2]["total"].is_null());
    assert_eq!(call(&app, "GET", "/v1/benchmark", None).await.code(), "missing-orgs");

    let cube = call(&app, "GET", "/v1/orgs/orgA/cube.ttl", None).await;
    assert_eq!(cube.status, StatusCode::OK);
    assert_eq!(cube.headers[header::CONTENT_TYPE], "text/turtle; charset=utf-8");
    let graph = parse_turtle(&cube.text(), BASE).unwrap();
    assert!(check_cube(&graph).ok);
    assert_eq!(graph.observation_count(), 54);
    assert_eq!(call(&app, "GET", "/v1/orgs/orgQ/cube.ttl", None).await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn reads_do_not_touch_the_journal() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app_with(dir.path(), None);
    put_default(&app).await;
    let c = default_checklist();
    submit(&app, &table2_assessment(&c, "orgA", period("2019-01"))).await;
    let before = std::fs::read(dir.path().join(JOURNAL_FILE)).unwrap();
    for uri in [
        "/v1/checklists",
        "/v1/orgs/orgA/report/2019-01",
        "/v1/orgs/orgA/assessments/2019-01",
        "/v1/orgs/orgA/trend",
        "/v1/orgs/orgA/cube.ttl",
        "/v1/benchmark?orgs=orgA",
    ] {
        assert_eq!(call(&app, "GET", uri, None).await.status, StatusCode::OK, "{uri}");
    }
    assert_eq!(std::fs::read(dir.path().join(JOURNAL_FILE)).unwrap(), before);
}

#[tokio::test]
async fn bearer_token() {
    let dir = tempfile::tempdir().unwrap();
    let (_, app) = app_with(dir.path(), Some("s3cret"));
    let denied = call(&app, "GET", "/v1/checklists", None).await;
    assert_eq!((denied.status, denied.code().as_str()), (StatusCode::UNAUTHORIZED, "unauthorized"));
    assert_eq!(denied.headers[header::WWW_AUTHENTICATE], "Bearer");
    let wrong = call_with(&app, "GET", "/v1/checklists", None, Some("s3cre")).await;
    assert_eq!(wrong.status, StatusCode::UNAUTHORIZED);
    let ok = call_with(&app, "GET", "/v1/checklists", None, Some("s3cret")).await;
    assert_eq!(ok.status, StatusCode::OK);
}

#[test]
fn bad_base_iri_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(dir.path()).unwrap());
    let config = ServiceConfig {
        base_iri: "not an iri".into(),
        token: None,
    };
    assert!(router(store, config).is_err());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn parallel_submissions_get_every_revision_once() {
    let dir = tempfile::tempdir().unwrap();
    let (store, app) = app_with(dir.path(), None);
    put_default(&app).await;
    let c = default_checklist();
    let a = table2_assessment(&c, "orgA", period("2019-04"));

    let tasks: Vec<_> = (0..8)
        .map(|_| {
            let (app, a) = (app.clone(), a.clone());
            tokio::spawn(async move { submit(&app, &a).await.json()["revision"].as_u64().unwrap() })
        })
        .collect();
    let mut revisions = BTreeSet::new();
    for task in tasks {
        assert!(revisions.insert(task.await.unwrap()));
    }
    assert_eq!(revisions, (1..=8).collect());

    let snapshot = store.snapshot();
    drop(app);
    drop(store);
    assert_eq!(*Store::open(dir.path()).unwrap().snapshot(), *snapshot);
}
