use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use intervene_core::{InterventionSet, TestOutcome};

use super::session::{CreateRequest, ErrorCode, ServiceError};
use super::store::Store;

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self.code {
            ErrorCode::ValidationError => StatusCode::BAD_REQUEST,
            ErrorCode::NotFoundError => StatusCode::NOT_FOUND,
            ErrorCode::SessionDoneError | ErrorCode::DuplicateSubmissionError | ErrorCode::ContradictionWarning => {
                StatusCode::CONFLICT
            }
            ErrorCode::UnknownTestError | ErrorCode::NotViableError | ErrorCode::InfeasibleError => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ErrorCode::InternalError => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = ErrorBody {
            code: self.code,
            message: self.message,
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OutcomesRequest {
    pub outcomes: Vec<TestOutcome>,
    #[serde(default)]
    pub accept_contradictions: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WhatIfRequest {
    pub interventions: InterventionSet,
}

type AppState = Arc<Store>;
type Reply<T> = Result<Json<T>, ServiceError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(session))
        .route("/sessions/{id}/proposal", get(proposal))
        .route("/sessions/{id}/outcomes", post(outcomes))
        .route("/sessions/{id}/whatif", post(whatif))
        .route("/sessions/{id}/history", get(history))
        .route("/sessions/{id}/autoanswer", post(autoanswer))
        .with_state(store)
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn list(State(store): State<AppState>) -> Json<Vec<String>> {
    Json(store.ids())
}

async fn create(
    State(store): State<AppState>,
    body: Result<Json<CreateRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<super::SessionView>), ServiceError> {
    let Json(req) = body.map_err(|e| ServiceError::new(ErrorCode::ValidationError, e.body_text()))?;
    Ok((StatusCode::CREATED, Json(store.create(req)?)))
}

async fn session(State(store): State<AppState>, Path(id): Path<String>) -> Reply<super::SessionView> {
    Ok(Json(store.view(&id)?))
}

async fn proposal(State(store): State<AppState>, Path(id): Path<String>) -> Reply<super::ProposalView> {
    Ok(Json(store.proposal(&id)?))
}

async fn outcomes(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<OutcomesRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<super::SubmitResult>), ServiceError> {
    let Json(req) = body.map_err(|e| ServiceError::new(ErrorCode::ValidationError, e.body_text()))?;
    let result = store.submit(&id, &req.outcomes, req.accept_contradictions)?;
    // a partial submission is buffered and the round stays open
    let status = if result.closed {
        StatusCode::OK
    } else {
        StatusCode::ACCEPTED
    };
    Ok((status, Json(result)))
}

async fn whatif(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<WhatIfRequest>, axum::extract::rejection::JsonRejection>,
) -> Reply<super::WhatIf> {
    let Json(req) = body.map_err(|e| ServiceError::new(ErrorCode::ValidationError, e.body_text()))?;
    Ok(Json(store.whatif(&id, &req.interventions)?))
}

async fn history(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> Reply<Vec<intervene_core::planner::RoundLog>> {
    Ok(Json(store.history(&id)?))
}

async fn autoanswer(State(store): State<AppState>, Path(id): Path<String>) -> Reply<super::SubmitResult> {
    Ok(Json(store.autoanswer(&id)?))
}
