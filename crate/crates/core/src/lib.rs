//! Checkpoint-chained function execution for timeout-limited FaaS platforms.
//!
//! A workload that needs more compute time than a single function slot allows
//! is run as a *chain*: each invocation restores the previous checkpoint (if
//! any), works until a trigger fires short of the platform timeout, then
//! checkpoints its state, persists it, and re-invokes the same action. The
//! final invocation completes the workload and writes the chain's result.
//!
//! The crate is organized around the pieces of that loop:
//!
//! - [`model`] — shared domain types and their canonical JSON encodings.
//! - [`clock`] — real and simulated monotonic clocks; the simulated clock
//!   makes chain behavior deterministic and testable.
//! - [`workloads`] — the built-in checkpointable workloads (`counter`,
//!   `factors`, `matrix`) and the cooperative state contract they satisfy.
//! - [`checkpoint`] — the checkpoint/restore abstraction with a cooperative
//!   (state-serializing) backend and an external-tool adapter.
//! - [`stores`] — checkpoint and results repositories with in-memory,
//!   local-filesystem, and latency-injecting stub backends.
//! - [`runner`] — the per-invocation orchestrator: restore, work, checkpoint
//!   on trigger, re-invoke, finalize.
//! - [`gateway`] — a desk-scale platform simulator that registers actions,
//!   enforces timeouts, records activations, and reports per-chain billing.

pub mod checkpoint;
pub mod clock;
pub mod gateway;
pub mod model;
pub mod runner;
pub mod stores;
pub mod workloads;
