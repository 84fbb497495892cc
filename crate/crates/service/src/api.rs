use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use pieceshap::position::{parse_fen, FenError};
use serde::Serialize;
use serde_json::json;
use tokio::sync::mpsc::error::TrySendError;

use crate::jobs::{CompareRequest, ExplainRequest, JobRequest, RunOptions};
use crate::worker::QueuedJob;
use crate::AppState;

/// Largest `exact_threshold` a request may ask for; 2^20 coalitions.
pub const MAX_EXACT_THRESHOLD: usize = 20;

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, error: impl Into<String>) -> Self {
        ApiError { status, error: error.into(), field: None }
    }
}

impl From<FenError> for ApiError {
    fn from(e: FenError) -> Self {
        let field = match &e {
            FenError::MalformedFen { field, .. } => Some(field.to_string()),
            FenError::IllegalSetup(_) => None,
        };
        ApiError { status: StatusCode::BAD_REQUEST, error: e.to_string(), field }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

fn check_options(options: &RunOptions) -> Result<(), ApiError> {
    for limit in [options.root_limit, options.perturb_limit].into_iter().flatten() {
        if !limit.is_valid() {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("limit {limit} must be positive")));
        }
    }
    if options.exact_threshold.is_some_and(|t| t > MAX_EXACT_THRESHOLD) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            format!("exact_threshold may be at most {MAX_EXACT_THRESHOLD}"),
        ));
    }
    Ok(())
}

fn enqueue(
    state: &AppState,
    request: JobRequest,
    fen: &str,
    evaluators: Vec<String>,
    options: RunOptions,
) -> Result<impl IntoResponse, ApiError> {
    let position = parse_fen(fen)?;
    for id in &evaluators {
        if state.engines.registry().get(id).is_none() {
            return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown evaluator {id:?}")));
        }
    }
    check_options(&options)?;
    let id = state.store.create(request);
    match state.queue.try_send(QueuedJob { id, position, evaluators, options }) {
        Ok(()) => Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": id })))),
        Err(e) => {
            state.store.remove(id);
            Err(match e {
                TrySendError::Full(_) => ApiError::new(StatusCode::TOO_MANY_REQUESTS, "job queue is full"),
                TrySendError::Closed(_) => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "service is shutting down"),
            })
        }
    }
}

pub async fn explain(
    State(state): State<Arc<crate::Inner>>,
    Json(req): Json<ExplainRequest>,
) -> Result<impl IntoResponse, ApiError> {
    let (fen, evaluators, options) = (req.fen.clone(), vec![req.evaluator_id.clone()], req.options.clone());
    enqueue(&state, JobRequest::Explain(req), &fen, evaluators, options)
}

pub async fn compare(
    State(state): State<Arc<crate::Inner>>,
    Json(req): Json<CompareRequest>,
) -> Result<impl IntoResponse, ApiError> {
    let (fen, options) = (req.fen.clone(), req.options.clone());
    let evaluators = vec![req.evaluator_a.clone(), req.evaluator_b.clone()];
    enqueue(&state, JobRequest::Compare(req), &fen, evaluators, options)
}

pub async fn job(State(state): State<Arc<crate::Inner>>, Path(id): Path<u64>) -> Result<Response, ApiError> {
    match state.store.get(id) {
        Some(record) => Ok(Json(record).into_response()),
        None => Err(ApiError::new(StatusCode::NOT_FOUND, format!("no job {id}"))),
    }
}

pub async fn engines(State(state): State<Arc<crate::Inner>>) -> Response {
    let list: Vec<_> = state.engines.registry().descriptors().collect();
    Json(json!({ "engines": list })).into_response()
}
