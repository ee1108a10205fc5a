//! HTTP client adapters closing the invoke loop.
//!
//! Clients are built lazily on first use: these adapters are called from
//! blocking runner threads, never from the async executor, and a blocking
//! reqwest client cannot be constructed inside an async context.

use std::sync::OnceLock;
use std::time::Duration;

use ckptchain_core::gateway::RemoteAction;
use ckptchain_core::runner::{InvokeError, Invoker};

fn blocking_client(slot: &OnceLock<reqwest::blocking::Client>, timeout: Duration) -> &reqwest::blocking::Client {
    slot.get_or_init(|| {
        reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("reqwest client")
    })
}

/// Re-invokes an action through the gateway API; this is what an action
/// server uses to schedule its own successor.
pub struct HttpInvoker {
    gateway_url: String,
    action: String,
    client: OnceLock<reqwest::blocking::Client>,
}

impl HttpInvoker {
    pub fn new(gateway_url: impl Into<String>, action: impl Into<String>) -> Self {
        HttpInvoker {
            gateway_url: gateway_url.into(),
            action: action.into(),
            client: OnceLock::new(),
        }
    }
}

impl Invoker for HttpInvoker {
    fn invoke_next(&self, params: serde_json::Value) -> Result<String, InvokeError> {
        let url = format!(
            "{}/api/actions/{}/invoke?blocking=false",
            self.gateway_url.trim_end_matches('/'),
            self.action
        );
        let response = blocking_client(&self.client, Duration::from_secs(10))
            .post(&url)
            .json(&params)
            .send()
            .map_err(|e| InvokeError(format!("gateway unreachable: {e}")))?;
        let status = response.status();
        let body: serde_json::Value = response
            .json()
            .map_err(|e| InvokeError(format!("bad gateway response: {e}")))?;
        if !status.is_success() {
            return Err(InvokeError(format!("gateway returned {status}: {body}")));
        }
        body.get("activation_id")
            .and_then(|v| v.as_str())
            .map(|s| s.to_string())
            .ok_or_else(|| InvokeError(format!("gateway response missing activation id: {body}")))
    }
}

/// Drives a remote action-interface server: POSTs the platform run payload
/// to `/run` and returns the response JSON for the gateway to interpret.
pub struct HttpRemoteAction {
    action_url: String,
    max_run_ms: u64,
    client: OnceLock<reqwest::blocking::Client>,
}

impl HttpRemoteAction {
    /// `action_url` is the base of the action server, e.g. `http://host:8080`.
    /// `max_run_ms` bounds one run request; give it the action timeout plus
    /// margin for checkpoint and upload work.
    pub fn new(action_url: impl Into<String>, max_run_ms: u64) -> Self {
        HttpRemoteAction {
            action_url: action_url.into(),
            max_run_ms,
            client: OnceLock::new(),
        }
    }
}

impl RemoteAction for HttpRemoteAction {
    fn run(&self, payload: serde_json::Value) -> Result<serde_json::Value, String> {
        let url = format!("{}/run", self.action_url.trim_end_matches('/'));
        let response = blocking_client(&self.client, Duration::from_millis(self.max_run_ms))
            .post(&url)
            .json(&payload)
            .send()
            .map_err(|e| format!("action server unreachable: {e}"))?;
        response
            .json()
            .map_err(|e| format!("action server returned non-JSON: {e}"))
    }
}
