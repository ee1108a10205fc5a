//! Per-invocation orchestration.
//!
//! [`execute_invocation`] is one link of the chain: restore the latest
//! checkpoint if one exists, run the workload, and race its completion
//! against the checkpoint timer. Whichever transition happens first wins and
//! does all post-transition work:
//!
//! - completion first → the timer is canceled (no checkpoint artifact is
//!   written) and the result is finalized against the results repository;
//! - trigger first → checkpoint, upload (upload always completes before
//!   re-invocation, so the successor never races its own checkpoint's
//!   availability), then re-invoke the same action with the advanced context.
//!
//! On a simulated clock the race is resolved by deterministic event ordering
//! at workload step boundaries, with completion checked strictly before the
//! timer at equal instants.

use std::collections::VecDeque;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::checkpoint::{
    CheckpointError, CooperativeCheckpointer, ExternalAdapter, ExternalRun, ManagedWorkload,
};
use crate::clock::{Clock, ClockMode};
use crate::model::{
    encode_params, ChainId, CheckpointManifest, ExecMode, InvocationContext, VerificationReport,
};
use crate::stores::{CheckpointRepo, FinalizeOutcome, ResultsRepo, StoreError};
use crate::workloads::{StepEffects, Workload, WorkloadError};

/// Marker carried in a failed outcome when the platform deadline killed the
/// invocation rather than the workload failing on its own.
pub const TIMEOUT_KILLED: &str = "timeout-killed";

#[derive(Debug, thiserror::Error)]
#[error("invoke failed: {0}")]
pub struct InvokeError(pub String);

/// Issues the re-invocation of the same action with successor parameters.
/// Non-blocking: returns as soon as the platform acknowledges the request
/// with an activation id.
pub trait Invoker: Send + Sync {
    fn invoke_next(&self, params: serde_json::Value) -> Result<String, InvokeError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RestorePolicy {
    /// A corrupt or unrestorable checkpoint fails the chain.
    #[default]
    FailChain,
    /// Degrade to a fresh start with a logged warning.
    RestartFromScratch,
}

/// Orchestration knobs for one action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunnerConfig {
    /// When the checkpoint timer fires, measured from receipt of the run
    /// request. Must be below the action timeout.
    pub checkpoint_trigger_ms: u64,
    /// First-writer-wins finalization. Off reproduces the duplicate-result
    /// behavior a completion-vs-checkpoint race causes.
    pub fencing_enabled: bool,
    /// Runaway-chain guard: invocations beyond this fail the chain.
    pub max_chain_length: u32,
    pub restore_policy: RestorePolicy,
    /// False disables the whole checkpoint/re-invoke machinery; the workload
    /// simply runs until it completes or the platform kills it.
    pub checkpointing_enabled: bool,
    /// Race-test configuration: after a checkpoint is taken, let the current
    /// workload keep running for up to this long instead of terminating it
    /// immediately. A workload finishing inside this window finalizes its own
    /// result even though a successor was already scheduled.
    pub race_window_ms: u64,
}

impl Default for RunnerConfig {
    fn default() -> Self {
        RunnerConfig {
            checkpoint_trigger_ms: crate::model::DEFAULT_TRIGGER_MS,
            fencing_enabled: true,
            max_chain_length: 64,
            restore_policy: RestorePolicy::FailChain,
            checkpointing_enabled: true,
            race_window_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Completed,
    CheckpointedAndReinvoked,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub restore_ms: u64,
    pub work_ms: u64,
    pub checkpoint_ms: u64,
    pub upload_ms: u64,
}

/// Which of the three paths this invocation took, and what it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvocationOutcome {
    pub chain_id: ChainId,
    pub seq: u32,
    pub kind: OutcomeKind,
    pub result: Option<serde_json::Value>,
    pub manifest: Option<CheckpointManifest>,
    pub next_activation_id: Option<String>,
    pub timings: Timings,
    pub error: Option<String>,
    /// True when the failure was the platform deadline, not the workload.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub killed_by_deadline: bool,
}

impl InvocationOutcome {
    fn base(ctx: &InvocationContext, kind: OutcomeKind) -> Self {
        InvocationOutcome {
            chain_id: ctx.chain_id.clone(),
            seq: ctx.seq,
            kind,
            result: None,
            manifest: None,
            next_activation_id: None,
            timings: Timings::default(),
            error: None,
            killed_by_deadline: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "decision")]
pub enum RestoreDecision {
    Fresh,
    Resumed { from_seq: u32 },
    Failed { reason: String },
}

/// Structured JSONL log of runner state transitions.
///
/// One line per transition: restore, work-start, trigger-armed,
/// checkpoint-start, checkpoint-done, upload-done, reinvoked, finalized —
/// plus failed/killed and margin warnings.
pub struct RunLog {
    sink: LogSink,
}

enum LogSink {
    Null,
    Memory(Mutex<Vec<serde_json::Value>>),
    Dir(PathBuf),
}

impl RunLog {
    pub fn null() -> Self {
        RunLog {
            sink: LogSink::Null,
        }
    }

    pub fn memory() -> Self {
        RunLog {
            sink: LogSink::Memory(Mutex::new(Vec::new())),
        }
    }

    pub fn dir(path: impl Into<PathBuf>) -> Self {
        RunLog {
            sink: LogSink::Dir(path.into()),
        }
    }

    pub fn emit(
        &self,
        now: u64,
        chain: &ChainId,
        seq: u32,
        event: &str,
        detail: serde_json::Value,
    ) {
        let line = serde_json::json!({
            "ts": now,
            "chain_id": chain.as_str(),
            "seq": seq,
            "event": event,
            "detail": detail,
        });
        match &self.sink {
            LogSink::Null => {}
            LogSink::Memory(buf) => buf.lock().unwrap().push(line),
            LogSink::Dir(dir) => {
                let write = || -> std::io::Result<()> {
                    fs::create_dir_all(dir)?;
                    let mut f = fs::OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(dir.join(format!("chain-{chain}.jsonl")))?;
                    writeln!(f, "{line}")
                };
                if let Err(e) = write() {
                    log::warn!("run log write failed: {e}");
                }
            }
        }
    }

    /// Captured events (memory sink only).
    pub fn events(&self) -> Vec<serde_json::Value> {
        match &self.sink {
            LogSink::Memory(buf) => buf.lock().unwrap().clone(),
            _ => Vec::new(),
        }
    }
}

/// Everything an invocation needs from its environment.
pub struct RunnerDeps<'a> {
    pub cooperative: &'a CooperativeCheckpointer,
    pub external: Option<&'a ExternalAdapter>,
    pub ckpt_repo: &'a dyn CheckpointRepo,
    pub results: &'a dyn ResultsRepo,
    pub invoker: &'a dyn Invoker,
    pub clock: &'a dyn Clock,
    pub log: &'a RunLog,
    /// Scratch space for checkpoint images in transit.
    pub scratch_dir: &'a Path,
}

struct RunnerEffects<'a> {
    clock: &'a dyn Clock,
    results: &'a dyn ResultsRepo,
    chain: &'a ChainId,
    seq: u32,
}

impl StepEffects for RunnerEffects<'_> {
    fn charge_work(&mut self, ms: u64) {
        self.clock.advance(ms);
    }

    fn charge_wait(&mut self, ms: u64) {
        self.clock.sleep(ms);
    }

    fn post_partial(&mut self, payload: serde_json::Value) -> Result<(), WorkloadError> {
        self.results
            .put_partial(self.chain, self.seq, &payload)
            .map_err(|e| WorkloadError::PartialPost(e.to_string()))
    }
}

enum SupervisionEnd {
    Completed { result: serde_json::Value },
    TriggerFired,
    Killed,
    Errored { reason: String },
}

/// Steps the workload until one of the three transitions wins. Completion is
/// checked before the deadline and the deadline before the trigger, all at
/// step boundaries, which is what makes simulated runs deterministic and
/// resolves trigger ties in favor of completion.
fn supervise_cooperative(
    w: &mut dyn Workload,
    fx: &mut RunnerEffects<'_>,
    clock: &dyn Clock,
    trigger_at: Option<u64>,
    deadline: u64,
) -> SupervisionEnd {
    loop {
        if w.is_complete() {
            return SupervisionEnd::Completed { result: w.result() };
        }
        let now = clock.now_ms();
        if now >= deadline {
            return SupervisionEnd::Killed;
        }
        if trigger_at.is_some_and(|t| now >= t) {
            return SupervisionEnd::TriggerFired;
        }
        if let Err(e) = w.step(fx) {
            return SupervisionEnd::Errored {
                reason: e.to_string(),
            };
        }
    }
}

fn supervise_external(
    run: &mut ExternalRun,
    clock: &dyn Clock,
    trigger_at: Option<u64>,
    deadline: u64,
    poll_ms: u64,
) -> SupervisionEnd {
    loop {
        match run.poll() {
            Ok(Some(status)) => {
                if status.success() {
                    return match run.result_from_stdout() {
                        Ok(result) => SupervisionEnd::Completed { result },
                        Err(e) => SupervisionEnd::Errored {
                            reason: format!("workload exited without a result: {e}"),
                        },
                    };
                }
                return SupervisionEnd::Errored {
                    reason: format!("workload exited with {status}: {}", run.output_tail(10)),
                };
            }
            Ok(None) => {}
            Err(e) => {
                return SupervisionEnd::Errored {
                    reason: format!("poll failed: {e}"),
                }
            }
        }
        let now = clock.now_ms();
        if now >= deadline {
            run.kill();
            return SupervisionEnd::Killed;
        }
        if trigger_at.is_some_and(|t| now >= t) {
            return SupervisionEnd::TriggerFired;
        }
        clock.sleep(poll_ms.max(1));
    }
}

/// Downloads and verifies the latest checkpoint for the chain, if any, and
/// rebuilds the workload from it.
///
/// `fresh` when no checkpoint exists; `resumed(from_seq)` when the latest
/// manifest downloads, verifies, and restores; `failed` otherwise — unless
/// the restore policy degrades failures to a fresh start.
pub fn restore_if_available(
    ctx: &InvocationContext,
    deps: &RunnerDeps<'_>,
    work_dir: &Path,
) -> (RestoreDecision, Option<ManagedWorkload>) {
    let hit = match deps.ckpt_repo.get_latest(&ctx.chain_id) {
        Ok(None) => return (RestoreDecision::Fresh, None),
        Ok(Some(hit)) => hit,
        Err(StoreError::Corrupt(e)) => {
            return (
                RestoreDecision::Failed {
                    reason: format!("corrupt: {e}"),
                },
                None,
            )
        }
        Err(e) => {
            return (
                RestoreDecision::Failed {
                    reason: format!("checkpoint repository error: {e}"),
                },
                None,
            )
        }
    };

    // download with digest verification before restore
    if let Err(report) = download_verified(&hit.manifest, hit.blobs.as_ref(), work_dir) {
        let detail: Vec<String> = report
            .files
            .iter()
            .filter(|f| !f.ok)
            .map(|f| format!("{}: {}", f.relative_path, f.reason.as_deref().unwrap_or("?")))
            .collect();
        return (
            RestoreDecision::Failed {
                reason: format!("corrupt: {}", detail.join("; ")),
            },
            None,
        );
    }

    let managed = match ctx.spec.mode {
        ExecMode::Cooperative => deps
            .cooperative
            .restore(&ctx.spec, &hit.manifest, work_dir)
            .map(ManagedWorkload::cooperative),
        ExecMode::ExternalProcess => match deps.external {
            Some(adapter) => adapter
                .restore(&hit.manifest, work_dir)
                .map(|run| ManagedWorkload::External { run }),
            None => Err(CheckpointError::ToolUnavailable(
                "no external adapter configured".into(),
            )),
        },
    };
    match managed {
        Ok(w) => (
            RestoreDecision::Resumed {
                from_seq: hit.manifest.seq,
            },
            Some(w),
        ),
        Err(e) => (
            RestoreDecision::Failed {
                reason: format!("restore-error: {e}"),
            },
            None,
        ),
    }
}

/// Fetches every manifest file, verifies its digest, and writes it under
/// `work_dir`. On any mismatch returns the failing report without restoring.
fn download_verified(
    manifest: &CheckpointManifest,
    blobs: &dyn crate::model::BlobFetch,
    work_dir: &Path,
) -> Result<(), VerificationReport> {
    let report = crate::model::verify_manifest(manifest, blobs);
    if !report.pass {
        return Err(report);
    }
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(work_dir)?;
        for entry in &manifest.files {
            if let Ok(Some(bytes)) = blobs.fetch(&entry.relative_path) {
                let dst = work_dir.join(&entry.relative_path);
                if let Some(parent) = dst.parent() {
                    fs::create_dir_all(parent)?;
                }
                fs::write(dst, bytes)?;
            }
        }
        Ok(())
    };
    write().map_err(|e| VerificationReport {
        files: vec![crate::model::FileCheck {
            relative_path: "<download>".into(),
            ok: false,
            reason: Some(e.to_string()),
        }],
        pass: false,
    })
}

/// Writes the chain's final result, fenced or not per config.
pub fn finalize(
    ctx: &InvocationContext,
    result: &serde_json::Value,
    results: &dyn ResultsRepo,
    config: &RunnerConfig,
    clock: &dyn Clock,
) -> Result<FinalizeOutcome, StoreError> {
    results.finalize(
        &ctx.chain_id,
        ctx.seq,
        result,
        clock.now_ms(),
        config.fencing_enabled,
    )
}

/// Runs one invocation of the chain end to end. Always returns an outcome;
/// failures are reported, never raised.
pub fn execute_invocation(
    ctx: &InvocationContext,
    config: &RunnerConfig,
    deps: &RunnerDeps<'_>,
) -> InvocationOutcome {
    let mut outcome = InvocationOutcome::base(ctx, OutcomeKind::Failed);
    if let Err(e) = ctx.validate() {
        outcome.error = Some(format!("invalid context: {e}"));
        return outcome;
    }
    let chain = &ctx.chain_id;
    let clock = deps.clock;
    let t0 = clock.now_ms();
    let deadline = t0 + ctx.timeout_ms;

    if let Err(e) = deps.results.record_invocation(chain, ctx.seq) {
        outcome.error = Some(format!("results repository unreachable: {e}"));
        return outcome;
    }

    if ctx.seq > config.max_chain_length {
        let reason = format!(
            "chain length {} exceeds maximum {}",
            ctx.seq, config.max_chain_length
        );
        let _ = deps.results.mark_failed(chain, &reason);
        deps.log.emit(
            clock.now_ms(),
            chain,
            ctx.seq,
            "failed",
            serde_json::json!({ "reason": reason }),
        );
        outcome.error = Some(reason);
        return outcome;
    }

    if ctx.spec.mode == ExecMode::ExternalProcess && clock.mode() != ClockMode::Real {
        let reason = "external-process mode requires a real clock".to_string();
        let _ = deps.results.mark_failed(chain, &reason);
        outcome.error = Some(reason);
        return outcome;
    }

    let slot_dir = deps.scratch_dir.join(chain.as_str()).join(ctx.seq.to_string());
    let work_dir = slot_dir.join("work");
    let ckpt_out_dir = slot_dir.join("ckpt");

    // 1. restore if a checkpoint exists
    let (decision, restored) = restore_if_available(ctx, deps, &work_dir);
    deps.log.emit(
        clock.now_ms(),
        chain,
        ctx.seq,
        "restore",
        serde_json::to_value(&decision).unwrap(),
    );
    let managed = match (decision, restored) {
        (RestoreDecision::Failed { reason }, _) => match config.restore_policy {
            RestorePolicy::FailChain => {
                let _ = deps.results.mark_failed(chain, &reason);
                outcome.error = Some(reason);
                return outcome;
            }
            RestorePolicy::RestartFromScratch => {
                log::warn!("chain {chain} seq {}: {reason}; restarting from scratch", ctx.seq);
                None
            }
        },
        (_, managed) => managed,
    };

    // 2. start or resume the workload
    let mut managed = match managed {
        Some(w) => w,
        None => {
            let launched = match ctx.spec.mode {
                ExecMode::Cooperative => deps
                    .cooperative
                    .launch(&ctx.spec)
                    .map(ManagedWorkload::cooperative)
                    .map_err(|e| e.to_string()),
                ExecMode::ExternalProcess => match deps.external {
                    Some(adapter) => adapter
                        .launch(&ctx.spec, &work_dir, &ckpt_out_dir)
                        .map(|run| ManagedWorkload::External { run })
                        .map_err(|e| e.to_string()),
                    None => Err("tool unavailable: no external adapter configured".into()),
                },
            };
            match launched {
                Ok(w) => w,
                Err(reason) => {
                    let _ = deps.results.mark_failed(chain, &reason);
                    outcome.error = Some(reason);
                    return outcome;
                }
            }
        }
    };
    outcome.timings.restore_ms = clock.now_ms() - t0;

    // 3. arm the checkpoint timer (origin: receipt of the run request)
    let trigger_at = config
        .checkpointing_enabled
        .then_some(t0 + ctx.checkpoint_trigger_ms);
    deps.log.emit(
        clock.now_ms(),
        chain,
        ctx.seq,
        "work-start",
        serde_json::json!({}),
    );
    if let Some(at) = trigger_at {
        deps.log.emit(
            clock.now_ms(),
            chain,
            ctx.seq,
            "trigger-armed",
            serde_json::json!({ "at": at }),
        );
    }

    let mut fx = RunnerEffects {
        clock,
        results: deps.results,
        chain,
        seq: ctx.seq,
    };
    let work_start = clock.now_ms();
    let end = match &mut managed {
        ManagedWorkload::Cooperative { workload } => match workload.as_deref_mut() {
            Some(w) => supervise_cooperative(w, &mut fx, clock, trigger_at, deadline),
            None => SupervisionEnd::Errored {
                reason: "dead handle".into(),
            },
        },
        ManagedWorkload::External { run } => {
            let poll_ms = 5;
            supervise_external(run, clock, trigger_at, deadline, poll_ms)
        }
    };
    outcome.timings.work_ms = clock.now_ms() - work_start;

    match end {
        SupervisionEnd::Completed { result } => {
            // completion won: the scheduled checkpoint is canceled and no
            // artifact is ever written for this seq
            match finalize(ctx, &result, deps.results, config, clock) {
                Ok(report) => {
                    deps.log.emit(
                        clock.now_ms(),
                        chain,
                        ctx.seq,
                        "finalized",
                        serde_json::json!({
                            "accepted": report == FinalizeOutcome::Accepted,
                        }),
                    );
                    if report == FinalizeOutcome::DuplicateRejected {
                        log::info!(
                            "chain {chain} seq {}: duplicate final rejected by fence: {result}",
                            ctx.seq
                        );
                    }
                    outcome.kind = OutcomeKind::Completed;
                    outcome.result = Some(result);
                }
                Err(e) => {
                    outcome.error = Some(format!("finalize failed: {e}"));
                    outcome.result = Some(result);
                }
            }
            outcome
        }
        SupervisionEnd::Killed => {
            deps.log.emit(
                clock.now_ms(),
                chain,
                ctx.seq,
                "killed",
                serde_json::json!({ "deadline": deadline }),
            );
            outcome.error = Some(TIMEOUT_KILLED.into());
            outcome.killed_by_deadline = true;
            outcome
        }
        SupervisionEnd::Errored { reason } => {
            let _ = deps.results.mark_failed(chain, &reason);
            deps.log.emit(
                clock.now_ms(),
                chain,
                ctx.seq,
                "failed",
                serde_json::json!({ "reason": reason }),
            );
            outcome.error = Some(reason);
            outcome
        }
        SupervisionEnd::TriggerFired => {
            checkpoint_and_reinvoke(ctx, config, deps, managed, &mut fx, ckpt_out_dir, outcome, deadline)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn checkpoint_and_reinvoke(
    ctx: &InvocationContext,
    config: &RunnerConfig,
    deps: &RunnerDeps<'_>,
    mut managed: ManagedWorkload,
    fx: &mut RunnerEffects<'_>,
    ckpt_out_dir: PathBuf,
    mut outcome: InvocationOutcome,
    deadline: u64,
) -> InvocationOutcome {
    let chain = &ctx.chain_id;
    let clock = deps.clock;

    deps.log.emit(
        clock.now_ms(),
        chain,
        ctx.seq,
        "checkpoint-start",
        serde_json::json!({}),
    );
    let ckpt_start = clock.now_ms();
    let manifest = match &mut managed {
        ManagedWorkload::Cooperative { workload } => match workload.as_deref() {
            Some(w) => deps
                .cooperative
                .checkpoint(chain, ctx.seq, w, &ckpt_out_dir, clock),
            None => Err(CheckpointError::DeadHandle),
        },
        ManagedWorkload::External { run } => match deps.external {
            Some(adapter) => adapter.checkpoint(chain, ctx.seq, run, &ckpt_out_dir, clock),
            None => Err(CheckpointError::ToolUnavailable("no adapter".into())),
        },
    };
    let manifest = match manifest {
        Ok(m) => m,
        Err(CheckpointError::AlreadyCompleted) => {
            // the workload beat the dump to the finish line; treat this seq
            // as a plain completion
            let result = match &mut managed {
                ManagedWorkload::Cooperative { workload } => {
                    workload.as_deref().map(|w| w.result())
                }
                ManagedWorkload::External { run } => run.result_from_stdout().ok(),
            };
            return match result {
                Some(result) => match finalize(ctx, &result, deps.results, config, clock) {
                    Ok(report) => {
                        deps.log.emit(
                            clock.now_ms(),
                            chain,
                            ctx.seq,
                            "finalized",
                            serde_json::json!({ "accepted": report == FinalizeOutcome::Accepted }),
                        );
                        outcome.kind = OutcomeKind::Completed;
                        outcome.result = Some(result);
                        outcome
                    }
                    Err(e) => {
                        outcome.error = Some(format!("finalize failed: {e}"));
                        outcome.result = Some(result);
                        outcome
                    }
                },
                None => {
                    let reason = "completed during checkpoint but result unavailable".to_string();
                    let _ = deps.results.mark_failed(chain, &reason);
                    outcome.error = Some(reason);
                    outcome
                }
            };
        }
        Err(e) => {
            let reason = format!("checkpoint failed: {e}");
            let _ = deps.results.mark_failed(chain, &reason);
            deps.log.emit(
                clock.now_ms(),
                chain,
                ctx.seq,
                "failed",
                serde_json::json!({ "reason": reason }),
            );
            outcome.error = Some(reason);
            return outcome;
        }
    };
    outcome.timings.checkpoint_ms = clock.now_ms() - ckpt_start;
    deps.log.emit(
        clock.now_ms(),
        chain,
        ctx.seq,
        "checkpoint-done",
        serde_json::json!({ "seq": manifest.seq, "bytes": manifest.total_bytes() }),
    );

    // Race configuration: the checkpointed state is already captured, but the
    // live workload keeps running for a window, as a dump-in-progress would.
    // If it finishes inside the window it finalizes its own result even
    // though the successor is about to be invoked.
    if config.race_window_ms > 0 {
        let window_end = clock.now_ms() + config.race_window_ms;
        loop {
            let done = match &mut managed {
                ManagedWorkload::Cooperative { workload } => match workload.as_deref_mut() {
                    Some(w) => {
                        if w.is_complete() {
                            Some(w.result())
                        } else if clock.now_ms() >= window_end || clock.now_ms() >= deadline {
                            break;
                        } else {
                            if w.step(fx).is_err() {
                                break;
                            }
                            None
                        }
                    }
                    None => break,
                },
                ManagedWorkload::External { run } => match run.poll() {
                    Ok(Some(status)) if status.success() => run.result_from_stdout().ok(),
                    Ok(Some(_)) => break,
                    Ok(None) => {
                        if clock.now_ms() >= window_end || clock.now_ms() >= deadline {
                            break;
                        }
                        clock.sleep(1);
                        None
                    }
                    Err(_) => break,
                },
            };
            if let Some(result) = done {
                let report = finalize(ctx, &result, deps.results, config, clock);
                deps.log.emit(
                    clock.now_ms(),
                    chain,
                    ctx.seq,
                    "race-completion",
                    serde_json::json!({
                        "accepted": matches!(report, Ok(FinalizeOutcome::Accepted)),
                    }),
                );
                break;
            }
        }
    }

    // terminate the current workload before handing over
    match &mut managed {
        ManagedWorkload::Cooperative { workload } => {
            workload.take();
        }
        ManagedWorkload::External { run } => run.kill(),
    }

    // 4. upload completes before re-invocation
    let upload_start = clock.now_ms();
    if let Err(e) = deps.ckpt_repo.put(&manifest, &ckpt_out_dir) {
        let reason = format!("checkpoint upload failed: {e}");
        let _ = deps.results.mark_failed(chain, &reason);
        deps.log.emit(
            clock.now_ms(),
            chain,
            ctx.seq,
            "failed",
            serde_json::json!({ "reason": reason }),
        );
        outcome.error = Some(reason);
        return outcome;
    }
    outcome.timings.upload_ms = clock.now_ms() - upload_start;
    deps.log.emit(
        clock.now_ms(),
        chain,
        ctx.seq,
        "upload-done",
        serde_json::json!({ "bytes": manifest.total_bytes() }),
    );

    // 5. re-invoke the same action with the advanced context
    let next = ctx.advance();
    let params = encode_params(&next);
    match deps.invoker.invoke_next(params) {
        Ok(activation_id) => {
            deps.log.emit(
                clock.now_ms(),
                chain,
                ctx.seq,
                "reinvoked",
                serde_json::json!({ "next_activation_id": activation_id, "next_seq": next.seq }),
            );
            let slack = ctx.timeout_ms - ctx.checkpoint_trigger_ms;
            let cost = outcome.timings.checkpoint_ms + outcome.timings.upload_ms;
            if slack < 2 * cost {
                log::warn!(
                    "chain {chain} seq {}: margin {slack} ms below 2x observed checkpoint+upload cost {cost} ms",
                    ctx.seq
                );
                deps.log.emit(
                    clock.now_ms(),
                    chain,
                    ctx.seq,
                    "margin-warning",
                    serde_json::json!({ "slack_ms": slack, "cost_ms": cost }),
                );
            }
            outcome.kind = OutcomeKind::CheckpointedAndReinvoked;
            outcome.manifest = Some(manifest);
            outcome.next_activation_id = Some(activation_id);
            outcome
        }
        Err(e) => {
            // the checkpoint is uploaded and stays resumable by a manual
            // re-invoke; report the failure with the manifest retained
            let reason = format!("re-invocation failed after upload: {e}");
            let _ = deps.results.mark_failed(chain, &reason);
            deps.log.emit(
                clock.now_ms(),
                chain,
                ctx.seq,
                "failed",
                serde_json::json!({ "reason": reason }),
            );
            outcome.error = Some(reason);
            outcome.manifest = Some(manifest);
            outcome
        }
    }
}

/// Test/bench helper: an invoker that queues successor parameters instead of
/// executing them, so a caller can drive the chain one invocation at a time.
pub struct QueueInvoker {
    queue: Mutex<VecDeque<serde_json::Value>>,
    counter: std::sync::atomic::AtomicU64,
    pub fail: std::sync::atomic::AtomicBool,
}

impl QueueInvoker {
    pub fn new() -> Self {
        QueueInvoker {
            queue: Mutex::new(VecDeque::new()),
            counter: std::sync::atomic::AtomicU64::new(0),
            fail: std::sync::atomic::AtomicBool::new(false),
        }
    }

    pub fn pop(&self) -> Option<serde_json::Value> {
        self.queue.lock().unwrap().pop_front()
    }
}

impl Default for QueueInvoker {
    fn default() -> Self {
        Self::new()
    }
}

impl Invoker for QueueInvoker {
    fn invoke_next(&self, params: serde_json::Value) -> Result<String, InvokeError> {
        if self.fail.load(std::sync::atomic::Ordering::Relaxed) {
            return Err(InvokeError("injected invoke failure".into()));
        }
        let n = self
            .counter
            .fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        self.queue.lock().unwrap().push_back(params);
        Ok(format!("queued-{n}"))
    }
}
