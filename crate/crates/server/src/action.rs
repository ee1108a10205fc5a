//! The platform action interface: an HTTP server with `/init` and `/run`.
//!
//! `/init` is accepted exactly once per server instance. `/run` decodes the
//! platform run payload into an invocation context and hands it to the
//! runner; runs are serialized behind a single-occupancy guard because the
//! platform contract is one activation at a time per instance (concurrent
//! runs are rejected with busy by default, or queued when configured).

use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::json;

use ckptchain_core::checkpoint::{CooperativeCheckpointer, ExternalAdapter};
use ckptchain_core::clock::{Clock, SystemClock};
use ckptchain_core::model::{decode_params, ChainId, InvocationContext, PLATFORM_MAX_TIMEOUT_MS};
use ckptchain_core::runner::{
    execute_invocation, InvokeError, Invoker, OutcomeKind, RunLog, RunnerConfig, RunnerDeps,
};
use ckptchain_core::stores::{CheckpointRepo, ResultsRepo};
use ckptchain_core::workloads::WorkloadRegistry;

/// How the action interface runs workloads and where it keeps state.
pub struct ActionRuntimeConfig {
    /// Checkpoint timer, measured from receipt of `/run`.
    pub trigger_ms: u64,
    /// Timeout assumed when the run payload carries no deadline.
    pub default_timeout_ms: u64,
    pub runner: RunnerConfig,
    /// Queue concurrent runs instead of rejecting them with busy.
    pub queue_runs: bool,
    /// Scratch space for checkpoint images in transit.
    pub scratch_dir: PathBuf,
}

impl Default for ActionRuntimeConfig {
    fn default() -> Self {
        ActionRuntimeConfig {
            trigger_ms: ckptchain_core::model::DEFAULT_TRIGGER_MS,
            default_timeout_ms: ckptchain_core::model::DEFAULT_TIMEOUT_MS,
            runner: RunnerConfig::default(),
            queue_runs: false,
            scratch_dir: std::env::temp_dir().join(format!("lf-action-{}", std::process::id())),
        }
    }
}

/// Invoker used when no gateway is wired up: re-invocation is impossible, so
/// chained runs fail at the handoff instead of silently stalling.
struct NoInvoker;

impl Invoker for NoInvoker {
    fn invoke_next(&self, _params: serde_json::Value) -> Result<String, InvokeError> {
        Err(InvokeError(
            "no invoker configured (set the gateway URL)".into(),
        ))
    }
}

pub struct ActionServer {
    config: ActionRuntimeConfig,
    initialized: Mutex<Option<String>>,
    run_guard: tokio::sync::Mutex<()>,
    cooperative: CooperativeCheckpointer,
    external: Option<ExternalAdapter>,
    ckpt_repo: Arc<dyn CheckpointRepo>,
    results: Arc<dyn ResultsRepo>,
    clock: Arc<dyn Clock>,
    log: Arc<RunLog>,
    invoker: Arc<dyn Invoker>,
}

impl ActionServer {
    pub fn new(
        config: ActionRuntimeConfig,
        ckpt_repo: Arc<dyn CheckpointRepo>,
        results: Arc<dyn ResultsRepo>,
        invoker: Option<Arc<dyn Invoker>>,
        external: Option<ExternalAdapter>,
        log: RunLog,
    ) -> Arc<Self> {
        Arc::new(ActionServer {
            config,
            initialized: Mutex::new(None),
            run_guard: tokio::sync::Mutex::new(()),
            cooperative: CooperativeCheckpointer::new(WorkloadRegistry::standard()),
            external,
            ckpt_repo,
            results,
            clock: Arc::new(SystemClock::new()),
            log: Arc::new(log),
            invoker: invoker.unwrap_or_else(|| Arc::new(NoInvoker)),
        })
    }

    fn epoch_now_ms() -> u64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0)
    }
}

/// Routes for one action instance.
pub fn action_app(server: Arc<ActionServer>) -> Router {
    Router::new()
        .route("/init", post(handle_init))
        .route("/run", post(handle_run))
        .with_state(server)
}

fn error_response(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn handle_init(
    State(server): State<Arc<ActionServer>>,
    body: Result<Json<serde_json::Value>, axum::extract::rejection::JsonRejection>,
) -> Response {
    let Ok(Json(body)) = body else {
        return error_response(StatusCode::BAD_REQUEST, "bad request: body must be JSON");
    };
    let Some(value) = body.get("value").and_then(|v| v.as_object()) else {
        return error_response(
            StatusCode::BAD_REQUEST,
            "bad request: missing `value` object",
        );
    };
    let name = value
        .get("name")
        .and_then(|n| n.as_str())
        .unwrap_or("action")
        .to_string();
    // `code`, `main`, and `binary` are accepted and ignored: workloads are
    // pre-registered in this runtime image
    let mut init = server.initialized.lock().unwrap();
    if init.is_some() {
        return error_response(StatusCode::FORBIDDEN, "already initialized");
    }
    *init = Some(name);
    (StatusCode::OK, Json(json!({ "ok": true }))).into_response()
}

async fn handle_run(
    State(server): State<Arc<ActionServer>>,
    body: Result<Json<serde_json::Value>, axum::extract::rejection::JsonRejection>,
) -> Response {
    let Ok(Json(body)) = body else {
        return error_response(StatusCode::BAD_REQUEST, "bad request: body must be JSON");
    };
    if server.initialized.lock().unwrap().is_none() {
        return error_response(StatusCode::BAD_GATEWAY, "not initialized");
    }
    let Some(value) = body.get("value").filter(|v| v.is_object()).cloned() else {
        return error_response(
            StatusCode::BAD_REQUEST,
            "bad request: missing `value` object",
        );
    };

    // one activation at a time per instance
    let _guard = if server.config.queue_runs {
        server.run_guard.lock().await
    } else {
        match server.run_guard.try_lock() {
            Ok(g) => g,
            Err(_) => return error_response(StatusCode::BAD_GATEWAY, "busy"),
        }
    };

    let activation_id = body
        .get("activation_id")
        .and_then(|v| v.as_str())
        .map(|s| s.to_string());
    let deadline = body.get("deadline").and_then(|v| v.as_u64());

    let decoded = match decode_params(&value) {
        Ok(d) => d,
        Err(e) => {
            return (StatusCode::OK, Json(json!({ "error": { "message": e.to_string() } })))
                .into_response()
        }
    };

    let timeout_ms = deadline
        .map(|d| d.saturating_sub(ActionServer::epoch_now_ms()).max(2))
        .unwrap_or(server.config.default_timeout_ms)
        .min(PLATFORM_MAX_TIMEOUT_MS);
    let trigger_ms = server.config.trigger_ms.min(timeout_ms - 1).max(1);

    let chain_id = decoded.chain_id.unwrap_or_else(|| {
        ChainId::new(format!("chain-{}", uuid::Uuid::new_v4().simple()))
            .expect("minted chain id is url-safe")
    });
    let ctx = InvocationContext {
        chain_id,
        seq: decoded.seq.unwrap_or(1),
        spec: decoded.spec,
        timeout_ms,
        checkpoint_trigger_ms: trigger_ms,
        activation_id,
    };

    let outcome = {
        let server = server.clone();
        tokio::task::spawn_blocking(move || {
            let deps = RunnerDeps {
                cooperative: &server.cooperative,
                external: server.external.as_ref(),
                ckpt_repo: server.ckpt_repo.as_ref(),
                results: server.results.as_ref(),
                invoker: server.invoker.as_ref(),
                clock: server.clock.as_ref(),
                log: &server.log,
                scratch_dir: &server.config.scratch_dir,
            };
            execute_invocation(&ctx, &server.config.runner, &deps)
        })
        .await
    };

    match outcome {
        Ok(outcome) if outcome.kind == OutcomeKind::Failed => {
            let message = outcome.error.clone().unwrap_or_else(|| "failed".into());
            (
                StatusCode::OK,
                Json(json!({ "error": { "message": message, "outcome": outcome } })),
            )
                .into_response()
        }
        Ok(outcome) => (StatusCode::OK, Json(json!({ "result": outcome }))).into_response(),
        Err(e) => error_response(StatusCode::BAD_GATEWAY, format!("runner panicked: {e}")),
    }
}
