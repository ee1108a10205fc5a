//! HTTP surfaces for the checkpoint-chained runtime.
//!
//! [`action`] implements the platform action interface — the `/init` and
//! `/run` endpoints a custom runtime exposes so a platform can drive it.
//! [`gateway_http`] exposes the desk-scale gateway over HTTP (invoke,
//! activation lookup, chain reports). [`client`] holds the HTTP client
//! adapters that close the loop: the invoker an action uses to re-invoke
//! itself through the gateway, and the remote-action client the gateway uses
//! to drive an action server.

pub mod action;
pub mod client;
pub mod gateway_http;
