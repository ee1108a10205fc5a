//! Gateway HTTP API.
//!
//! - `POST /api/actions/{name}/invoke?blocking=true|false` — JSON params in
//!   the body; blocking waits for the invocation's own outcome.
//! - `GET /api/activations/{id}` — one activation record.
//! - `GET /api/chains/{id}/report` — billing/trilemma report of a settled
//!   chain.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use ckptchain_core::gateway::{Gateway, GatewayError};
use ckptchain_core::model::ChainId;

pub fn gateway_app(gateway: Arc<Gateway>) -> Router {
    Router::new()
        .route("/api/actions/:name/invoke", post(invoke))
        .route("/api/activations/:id", get(activation))
        .route("/api/chains/:id/report", get(chain_report))
        .with_state(gateway)
}

#[derive(Deserialize)]
struct InvokeQuery {
    #[serde(default)]
    blocking: bool,
}

fn gateway_error(e: GatewayError) -> Response {
    let status = match &e {
        GatewayError::UnknownAction(_) | GatewayError::UnknownChain(_) => StatusCode::NOT_FOUND,
        GatewayError::Throttled { .. } => StatusCode::TOO_MANY_REQUESTS,
        GatewayError::ChainRunning(_) => StatusCode::CONFLICT,
        GatewayError::BadAction(_) | GatewayError::Unsupported(_) => StatusCode::BAD_REQUEST,
        GatewayError::Store(_) => StatusCode::INTERNAL_SERVER_ERROR,
    };
    (status, Json(json!({ "error": e.to_string() }))).into_response()
}

async fn invoke(
    State(gateway): State<Arc<Gateway>>,
    Path(name): Path<String>,
    Query(query): Query<InvokeQuery>,
    body: Result<Json<serde_json::Value>, axum::extract::rejection::JsonRejection>,
) -> Response {
    let params = match body {
        Ok(Json(v)) if v.is_object() => v,
        Ok(_) => {
            return (
                StatusCode::BAD_REQUEST,
                Json(json!({ "error": "params must be a JSON object" })),
            )
                .into_response()
        }
        Err(e) => {
            return (
                StatusCode::BAD_REQUEST,
                Json(json!({ "error": format!("bad body: {e}") })),
            )
                .into_response()
        }
    };
    let result = tokio::task::spawn_blocking(move || gateway.invoke(&name, params, query.blocking))
        .await
        .map_err(|e| GatewayError::Unsupported(format!("invoke panicked: {e}")));
    match result {
        Ok(Ok(reply)) => {
            let status = if query.blocking {
                StatusCode::OK
            } else {
                StatusCode::ACCEPTED
            };
            (
                status,
                Json(json!({
                    "activation_id": reply.activation_id,
                    "outcome": reply.outcome,
                })),
            )
                .into_response()
        }
        Ok(Err(e)) | Err(e) => gateway_error(e),
    }
}

async fn activation(State(gateway): State<Arc<Gateway>>, Path(id): Path<String>) -> Response {
    match gateway.activation(&id) {
        Some(record) => (StatusCode::OK, Json(record)).into_response(),
        None => (
            StatusCode::NOT_FOUND,
            Json(json!({ "error": format!("unknown activation {id:?}") })),
        )
            .into_response(),
    }
}

async fn chain_report(State(gateway): State<Arc<Gateway>>, Path(id): Path<String>) -> Response {
    let chain = match ChainId::new(id) {
        Ok(c) => c,
        Err(e) => {
            return (
                StatusCode::BAD_REQUEST,
                Json(json!({ "error": e.to_string() })),
            )
                .into_response()
        }
    };
    match gateway.chain_report(&chain) {
        Ok(report) => (StatusCode::OK, Json(report)).into_response(),
        Err(e) => gateway_error(e),
    }
}
