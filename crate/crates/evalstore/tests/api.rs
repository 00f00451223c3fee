use std::sync::{Arc, RwLock};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use fdes_core::{EvaluationRecord, FdesEngine, IndicatorId, RecordValue, TermLabel, UniverseSpec};
use fdes_evalstore::http::{router, StatusDoc};
use fdes_evalstore::EvalStore;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

fn engine() -> FdesEngine {
    FdesEngine::standard(UniverseSpec::grades())
}

fn app() -> (Router, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let store = EvalStore::open(engine(), &dir.path().join("eval.ndjson")).unwrap();
    (router(Arc::new(RwLock::new(store))), dir)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn single_term_record_passes_through_to_final() {
    let (app, _dir) = app();
    let (code, body) = call(
        &app,
        "POST",
        "/students/s-01/evaluations",
        Some(json!({"indicator": "A", "day": 1, "value": "G"})),
    )
    .await;
    assert_eq!(code, StatusCode::CREATED);
    assert_eq!(body["seq"], 1);
    assert_eq!(body["clamped"], false);

    let (code, status) = call(&app, "GET", "/students/s-01/status", None).await;
    assert_eq!(code, StatusCode::OK);
    let c_g = engine().variable().center(TermLabel::Good);
    assert_eq!(status["indicators"]["A"]["value"].as_f64(), Some(c_g));
    assert!((c_g - 16.667).abs() < 5e-4);
    assert_eq!(status["indicators"]["A"]["term"], "G");
    assert_eq!(status["indicators"]["B"]["value"], Value::Null);
    assert_eq!(status["final"]["crisp"].as_f64(), Some(c_g));
    assert_eq!(status["final"]["term"], "G");
    assert_eq!(status["y4"].as_f64(), Some(c_g));
    assert_eq!(status["last_day"], 1);
}

#[tokio::test]
async fn unknown_student_is_404() {
    let (app, _dir) = app();
    for path in ["status", "timeline", "report"] {
        let (code, _) = call(&app, "GET", &format!("/students/ghost/{path}"), None).await;
        assert_eq!(code, StatusCode::NOT_FOUND, "{path}");
    }
}

#[tokio::test]
async fn out_of_range_value_is_clamped_and_flagged() {
    let (app, _dir) = app();
    let (code, body) = call(
        &app,
        "POST",
        "/students/s/evaluations",
        Some(json!({"indicator": "B", "month": "MEHR", "day_of_month": 3, "value": 25})),
    )
    .await;
    assert_eq!(code, StatusCode::CREATED);
    assert_eq!(body["clamped"], true);
    assert_eq!(body["indicators"]["B"]["value"].as_f64(), Some(20.0));
    assert_eq!(body["final"]["term"], "VG");
}

#[tokio::test]
async fn day_regression_is_409_and_changes_nothing() {
    let (app, _dir) = app();
    let post = |day: u16| json!({"indicator": "C", "day": day, "value": 14.0});
    assert_eq!(call(&app, "POST", "/students/s/evaluations", Some(post(40))).await.0, StatusCode::CREATED);
    let (_, before) = call(&app, "GET", "/students/s/status", None).await;
    let (code, body) = call(&app, "POST", "/students/s/evaluations", Some(post(39))).await;
    assert_eq!(code, StatusCode::CONFLICT);
    assert_eq!(body["last_day"], 40);
    let (_, after) = call(&app, "GET", "/students/s/status", None).await;
    assert_eq!(before, after);
    let (code, body) = call(&app, "POST", "/students/s/evaluations", Some(post(40))).await;
    assert_eq!(code, StatusCode::CREATED);
    assert_eq!(body["seq"], 2);
}

#[tokio::test]
async fn validation_errors_name_fields() {
    let (app, _dir) = app();
    let (code, body) = call(
        &app,
        "POST",
        "/students/s/evaluations",
        Some(json!({"indicator": "F", "day": 0, "value": "excellent"})),
    )
    .await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    let mut fields: Vec<&str> = body["errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["field"].as_str().unwrap())
        .collect();
    fields.sort();
    assert_eq!(fields, ["day", "indicator", "value"]);
    let (code, _) = call(&app, "GET", "/students/s/status", None).await;
    assert_eq!(code, StatusCode::NOT_FOUND);

    let (code, body) = call(&app, "GET", "/students/s/timeline?from=9&to=3", None).await;
    assert_eq!(code, StatusCode::BAD_REQUEST);
    assert_eq!(body["errors"][0]["field"], "from");
}

#[tokio::test]
async fn http_status_matches_engine_for_the_same_sequence() {
    let (app, _dir) = app();
    let engine = engine();
    let mut state = engine.empty_state();
    let inputs = [
        ("A", 1, json!(17.2)),
        ("B", 31, json!("AE")),
        ("A", 32, json!(19.04)),
        ("C", 61, json!(11.333333)),
        ("E", 61, json!("VG")),
        ("D", 95, json!(16.7)),
        ("B", 120, json!(9.0)),
    ];
    for (ind, day, value) in inputs {
        let (code, body) = call(
            &app,
            "POST",
            "/students/s-9/evaluations",
            Some(json!({"indicator": ind, "day": day, "value": value})),
        )
        .await;
        assert_eq!(code, StatusCode::CREATED);
        let rec = EvaluationRecord {
            student_id: "s-9".into(),
            indicator: ind.parse::<IndicatorId>().unwrap(),
            day,
            value: serde_json::from_value::<RecordValue>(value).unwrap(),
            note: String::new(),
        };
        state = engine.apply_record(&state, &rec).unwrap();
        let expected = serde_json::to_value(StatusDoc::new(&engine, "s-9", &state)).unwrap();
        let (_, status) = call(&app, "GET", "/students/s-9/status", None).await;
        assert_eq!(status, expected);
        for key in ["indicators", "y1", "y2", "y3", "y4", "final"] {
            assert_eq!(body[key], expected[key], "{key}");
        }
    }

    let (code, tl) = call(&app, "GET", "/students/s-9/timeline?from=30&to=100", None).await;
    assert_eq!(code, StatusCode::OK);
    let days: Vec<u64> = tl["points"].as_array().unwrap().iter().map(|p| p["day"].as_u64().unwrap()).collect();
    assert_eq!(days, [31, 32, 61, 95]);

    let (code, report) = call(&app, "GET", "/students/s-9/report", None).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(report["final_out"], serde_json::to_value(engine.report(&state).final_out).unwrap());
    assert_eq!(report["record_count"], 7);
    assert_eq!(report["indicators"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn healthz_answers() {
    let (app, _dir) = app();
    let (code, body) = call(&app, "GET", "/healthz", None).await;
    assert_eq!(code, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}
