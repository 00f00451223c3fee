//! HTTP/JSON API over an [`EvalStore`].
//!
//! | method | path                          | success |
//! |--------|-------------------------------|---------|
//! | POST   | `/students/{id}/evaluations`  | 201     |
//! | GET    | `/students/{id}/status`       | 200     |
//! | GET    | `/students/{id}/timeline`     | 200     |
//! | GET    | `/students/{id}/report`       | 200     |
//! | GET    | `/healthz`                    | 200     |
//!
//! Validation failures answer 400 with `{"errors":[{"field":..,"message":..}]}`,
//! a day earlier than the student's last record answers 409, and unknown
//! students answer 404.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fdes_core::{
    calendar::check_day, day_of, EvaluationRecord, FdesEngine, FdesState, FinalOut, IndicatorId,
    Month, RecordValue, Report, TermLabel, SCHOOL_DAYS,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::StoreError;
use crate::store::{EvalStore, TimelinePoint};

pub type SharedStore = Arc<RwLock<EvalStore>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorStatus {
    pub value: Option<f64>,
    pub term: Option<TermLabel>,
    pub records: u32,
}

/// Body of the status endpoint and of a successful POST.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatusDoc {
    pub student_id: String,
    pub indicators: BTreeMap<IndicatorId, IndicatorStatus>,
    pub y1: Option<f64>,
    pub y2: Option<f64>,
    pub y3: Option<f64>,
    pub y4: Option<f64>,
    #[serde(rename = "final")]
    pub final_out: Option<FinalOut>,
    pub record_count: u32,
    pub last_day: Option<u16>,
}

impl StatusDoc {
    pub fn new(engine: &FdesEngine, student_id: &str, state: &FdesState) -> Self {
        let var = engine.variable();
        let indicators = IndicatorId::ALL
            .iter()
            .map(|&id| {
                let acc = state.accumulator(id);
                let status = IndicatorStatus {
                    value: acc.current(),
                    term: acc.current().map(|x| var.round_to_term(x)),
                    records: acc.update_count(),
                };
                (id, status)
            })
            .collect();
        let [y1, y2, y3, y4] = state.chain();
        Self {
            student_id: student_id.to_string(),
            indicators,
            y1,
            y2,
            y3,
            y4,
            final_out: engine.final_out(state).ok(),
            record_count: state.record_count(),
            last_day: state.last_update_day(),
        }
    }
}

#[derive(Debug, Serialize)]
struct PostResponse {
    seq: u64,
    clamped: bool,
    #[serde(flatten)]
    status: StatusDoc,
}

#[derive(Debug, Serialize)]
struct TimelineDoc {
    student_id: String,
    from: u16,
    to: u16,
    points: Vec<TimelinePoint>,
}

#[derive(Debug, Serialize)]
struct ReportDoc {
    student_id: String,
    display_name: String,
    course: String,
    #[serde(flatten)]
    report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

fn field_error(field: &str, message: impl Into<String>) -> FieldError {
    FieldError {
        field: field.to_string(),
        message: message.into(),
    }
}

enum ApiError {
    Validation(Vec<FieldError>),
    NotFound(String),
    Conflict { day: u16, last_day: u16, message: String },
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        match self {
            ApiError::Validation(errors) => {
                (StatusCode::BAD_REQUEST, Json(json!({ "errors": errors }))).into_response()
            }
            ApiError::NotFound(id) => (
                StatusCode::NOT_FOUND,
                Json(json!({ "error": format!("unknown student {id:?}") })),
            )
                .into_response(),
            ApiError::Conflict { day, last_day, message } => (
                StatusCode::CONFLICT,
                Json(json!({ "error": message, "day": day, "last_day": last_day })),
            )
                .into_response(),
            ApiError::Internal(message) => {
                (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": message }))).into_response()
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::OutOfOrder { day, last_day, .. } => ApiError::Conflict {
                day,
                last_day,
                message: e.to_string(),
            },
            StoreError::Invalid(m) => ApiError::Validation(vec![field_error("body", m)]),
            StoreError::Engine(inner) => ApiError::Validation(vec![field_error("body", inner.to_string())]),
            StoreError::Io { .. } | StoreError::Corrupt { .. } => ApiError::Internal(e.to_string()),
        }
    }
}

/// Parses an evaluation body, collecting every field problem at once.
fn parse_evaluation(student_id: &str, body: &[u8]) -> Result<EvaluationRecord, Vec<FieldError>> {
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| vec![field_error("body", format!("malformed JSON: {e}"))])?;
    let Value::Object(obj) = value else {
        return Err(vec![field_error("body", "expected a JSON object")]);
    };
    let mut errors = Vec::new();

    for key in obj.keys() {
        if !matches!(key.as_str(), "indicator" | "day" | "month" | "day_of_month" | "value" | "note") {
            errors.push(field_error(key, "unknown field"));
        }
    }

    let indicator = match obj.get("indicator") {
        Some(Value::String(s)) => s.parse::<IndicatorId>().map_err(|e| e.to_string()),
        Some(_) => Err("must be a string A..E".to_string()),
        None => Err("required".to_string()),
    }
    .map_err(|m| errors.push(field_error("indicator", m)))
    .ok();

    let day = parse_day(&obj, &mut errors);

    let value = match obj.get("value") {
        Some(Value::Number(n)) => match n.as_f64() {
            Some(x) if x.is_finite() => Ok(RecordValue::Crisp(x)),
            _ => Err("must be a finite number".to_string()),
        },
        Some(Value::String(s)) => s
            .parse::<TermLabel>()
            .map(RecordValue::Term)
            .map_err(|_| format!("unknown term {s:?} (expected NME, AE, G or VG)")),
        Some(_) => Err("must be a number or a term label".to_string()),
        None => Err("required".to_string()),
    }
    .map_err(|m| errors.push(field_error("value", m)))
    .ok();

    let note = match obj.get("note") {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            errors.push(field_error("note", "must be a string"));
            String::new()
        }
    };

    if student_id.trim().is_empty() {
        errors.push(field_error("id", "student id must not be empty"));
    }

    match (indicator, day, value) {
        (Some(indicator), Some(day), Some(value)) if errors.is_empty() => Ok(EvaluationRecord {
            student_id: student_id.to_string(),
            indicator,
            day,
            value,
            note,
        }),
        _ => Err(errors),
    }
}

fn parse_day(obj: &Map<String, Value>, errors: &mut Vec<FieldError>) -> Option<u16> {
    let as_int = |field: &str, v: &Value, errors: &mut Vec<FieldError>| match v.as_i64() {
        Some(n) => Some(n),
        None => {
            errors.push(field_error(field, "must be an integer"));
            None
        }
    };
    match (obj.get("day"), obj.get("month"), obj.get("day_of_month")) {
        (Some(d), None, None) => {
            let n = as_int("day", d, errors)?;
            check_day(n).map_err(|e| errors.push(field_error("day", e.to_string()))).ok()
        }
        (None, Some(m), Some(dom)) => {
            let month = match m {
                Value::String(s) => s
                    .parse::<Month>()
                    .map_err(|e| errors.push(field_error("month", e.to_string())))
                    .ok(),
                _ => {
                    errors.push(field_error("month", "must be a month name"));
                    None
                }
            };
            let dom = as_int("day_of_month", dom, errors)?;
            let month = month?;
            let Ok(dom) = u16::try_from(dom) else {
                errors.push(field_error("day_of_month", "out of range"));
                return None;
            };
            day_of(month, dom)
                .map_err(|e| errors.push(field_error("day_of_month", e.to_string())))
                .ok()
        }
        (None, None, None) => {
            errors.push(field_error("day", "required (or month and day_of_month)"));
            None
        }
        (Some(_), _, _) => {
            errors.push(field_error("day", "give either day or month and day_of_month, not both"));
            None
        }
        (None, None, Some(_)) => {
            errors.push(field_error("month", "required with day_of_month"));
            None
        }
        (None, Some(_), None) => {
            errors.push(field_error("day_of_month", "required with month"));
            None
        }
    }
}

async fn post_evaluation(
    State(store): State<SharedStore>,
    Path(student_id): Path<String>,
    body: Bytes,
) -> Result<(StatusCode, Json<PostResponse>), ApiError> {
    let record = parse_evaluation(&student_id, &body).map_err(ApiError::Validation)?;
    // The append fsyncs, so keep it off the async workers.
    let response = tokio::task::spawn_blocking(move || {
        let mut guard = store.write().map_err(|_| ApiError::Internal("store lock poisoned".into()))?;
        let outcome = guard.append(record)?;
        Ok::<_, ApiError>(PostResponse {
            seq: outcome.seq,
            clamped: outcome.clamped,
            status: StatusDoc::new(guard.engine(), &student_id, &outcome.state),
        })
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(response)))
}

fn read_store(store: &SharedStore) -> Result<std::sync::RwLockReadGuard<'_, EvalStore>, ApiError> {
    store.read().map_err(|_| ApiError::Internal("store lock poisoned".into()))
}

async fn get_status(
    State(store): State<SharedStore>,
    Path(student_id): Path<String>,
) -> Result<Json<StatusDoc>, ApiError> {
    let guard = read_store(&store)?;
    let state = guard
        .state(&student_id)
        .ok_or_else(|| ApiError::NotFound(student_id.clone()))?;
    Ok(Json(StatusDoc::new(guard.engine(), &student_id, state)))
}

fn query_day(query: &HashMap<String, String>, key: &str, default: u16) -> Result<u16, FieldError> {
    match query.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse::<i64>()
            .map_err(|_| field_error(key, format!("{s:?} is not an integer")))
            .and_then(|n| check_day(n).map_err(|e| field_error(key, e.to_string()))),
    }
}

async fn get_timeline(
    State(store): State<SharedStore>,
    Path(student_id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Json<TimelineDoc>, ApiError> {
    let from = query_day(&query, "from", 1);
    let to = query_day(&query, "to", SCHOOL_DAYS);
    let (from, to) = match (from, to) {
        (Ok(f), Ok(t)) if f <= t => (f, t),
        (Ok(_), Ok(_)) => {
            return Err(ApiError::Validation(vec![field_error("from", "must not be after to")]))
        }
        (f, t) => {
            return Err(ApiError::Validation(
                [f.err(), t.err()].into_iter().flatten().collect(),
            ))
        }
    };
    let guard = read_store(&store)?;
    let points = guard
        .timeline(&student_id, from, to)
        .ok_or_else(|| ApiError::NotFound(student_id.clone()))??;
    Ok(Json(TimelineDoc {
        student_id,
        from,
        to,
        points,
    }))
}

async fn get_report(
    State(store): State<SharedStore>,
    Path(student_id): Path<String>,
) -> Result<Json<ReportDoc>, ApiError> {
    let guard = read_store(&store)?;
    let state = guard
        .state(&student_id)
        .ok_or_else(|| ApiError::NotFound(student_id.clone()))?;
    let roster = guard.roster().get(&student_id).cloned().unwrap_or_default();
    Ok(Json(ReportDoc {
        report: guard.engine().report(state),
        student_id,
        display_name: roster.display_name,
        course: roster.course,
    }))
}

async fn healthz(State(store): State<SharedStore>) -> Result<Json<Value>, ApiError> {
    let guard = read_store(&store)?;
    Ok(Json(json!({ "status": "ok", "students": guard.roster().len() })))
}

pub fn router(store: SharedStore) -> Router {
    Router::new()
        .route("/students/{id}/evaluations", post(post_evaluation))
        .route("/students/{id}/status", get(get_status))
        .route("/students/{id}/timeline", get(get_timeline))
        .route("/students/{id}/report", get(get_report))
        .route("/healthz", get(healthz))
        .with_state(store)
}

/// Serves the API until ctrl-c. Prints `listening on ADDR` once bound.
pub async fn serve(addr: SocketAddr, store: EvalStore) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    println!("listening on {}", listener.local_addr()?);
    let app = router(Arc::new(RwLock::new(store)));
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
