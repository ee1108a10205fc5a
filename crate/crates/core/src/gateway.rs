//! Desk-scale FaaS platform simulator and invoker.
//!
//! The gateway registers actions, accepts invoke requests, runs activations,
//! enforces the per-activation timeout, and keeps the activation records that
//! back per-chain billing reports.
//!
//! Two execution regimes share the same code path:
//!
//! - **Simulated clock** — activations run to quiescence on the caller's
//!   thread through a deterministic FIFO drive loop. Re-invocations issued by
//!   the runner are queued and executed in order, so identical inputs produce
//!   bit-identical activation records.
//! - **Real clock** — blocking invokes run inline, non-blocking invokes run
//!   on spawned threads, and the concurrency limit is enforced per action.
//!
//! Actions execute in-process by default; a registered action may instead
//! point at a remote action-interface server through [`RemoteAction`].

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, Weak};

use serde::{Deserialize, Serialize};

use crate::checkpoint::{CooperativeCheckpointer, ExternalAdapter};
use crate::clock::{clock_for, Clock, ClockMode};
use crate::model::{
    decode_params, params_digest, ActivationOutcome, ActivationRecord, ChainId, ChainStatus,
    InvocationContext, DEFAULT_MEMORY_MB, DEFAULT_TIMEOUT_MS, PLATFORM_MAX_MEMORY_MB,
    PLATFORM_MAX_TIMEOUT_MS,
};
use crate::runner::{
    execute_invocation, InvocationOutcome, InvokeError, Invoker, OutcomeKind, RunLog, RunnerConfig,
    RunnerDeps,
};
use crate::stores::{CheckpointRepo, RepoConfig, ResultsRepo, StoreError};
use crate::workloads::WorkloadRegistry;

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("unknown action {0:?}")]
    UnknownAction(String),
    #[error("throttled: action {action:?} is at its concurrency limit {limit}")]
    Throttled { action: String, limit: u32 },
    #[error("invalid action config: {0}")]
    BadAction(String),
    #[error("unknown chain {0}")]
    UnknownChain(ChainId),
    #[error("chain {0} is still running")]
    ChainRunning(ChainId),
    #[error("store error: {0}")]
    Store(#[from] StoreError),
    #[error("{0}")]
    Unsupported(String),
}

/// Registered action limits, mirroring the platform defaults: 60 s timeout
/// (up to 300 s), 256 MiB memory (up to 512 MiB).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionConfig {
    pub name: String,
    pub timeout_ms: u64,
    pub memory_mb: u64,
    pub concurrency_limit: u32,
    /// When false the checkpoint/re-invoke machinery is disabled and the
    /// action behaves like a plain platform function.
    pub chained: bool,
    pub runner: RunnerConfig,
}

impl ActionConfig {
    pub fn new(name: impl Into<String>) -> Self {
        ActionConfig {
            name: name.into(),
            timeout_ms: DEFAULT_TIMEOUT_MS,
            memory_mb: DEFAULT_MEMORY_MB,
            concurrency_limit: 16,
            chained: true,
            runner: RunnerConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.name.is_empty() {
            return Err(GatewayError::BadAction("empty action name".into()));
        }
        if self.timeout_ms == 0 || self.timeout_ms > PLATFORM_MAX_TIMEOUT_MS {
            return Err(GatewayError::BadAction(format!(
                "timeout_ms must be in (0, {PLATFORM_MAX_TIMEOUT_MS}], got {}",
                self.timeout_ms
            )));
        }
        if self.memory_mb == 0 || self.memory_mb > PLATFORM_MAX_MEMORY_MB {
            return Err(GatewayError::BadAction(format!(
                "memory_mb must be in (0, {PLATFORM_MAX_MEMORY_MB}], got {}",
                self.memory_mb
            )));
        }
        if self.concurrency_limit == 0 {
            return Err(GatewayError::BadAction("concurrency_limit must be >= 1".into()));
        }
        if self.chained && self.runner.checkpoint_trigger_ms >= self.timeout_ms {
            return Err(GatewayError::BadAction(format!(
                "checkpoint trigger {} must be below the action timeout {}",
                self.runner.checkpoint_trigger_ms, self.timeout_ms
            )));
        }
        Ok(())
    }
}

/// A remote action-interface instance: given the platform run payload, return
/// the action's run response JSON (`{"result": ...}` or `{"error": ...}`).
pub trait RemoteAction: Send + Sync {
    fn run(&self, payload: serde_json::Value) -> Result<serde_json::Value, String>;
}

enum Target {
    InProcess,
    Remote(Arc<dyn RemoteAction>),
}

struct RegisteredAction {
    config: ActionConfig,
    target: Target,
}

struct QueuedActivation {
    activation_id: String,
    action: String,
    params: serde_json::Value,
}

/// Per-activation bookkeeping beyond the platform record.
#[derive(Clone)]
struct ActivationMeta {
    outcome: InvocationOutcome,
    params: serde_json::Value,
}

/// Mints chain and activation ids: sequential in simulated mode so records
/// are reproducible, random in real mode.
struct IdMinter {
    mode: ClockMode,
    chains: AtomicU64,
    activations: AtomicU64,
}

impl IdMinter {
    fn new(mode: ClockMode) -> Self {
        IdMinter {
            mode,
            chains: AtomicU64::new(0),
            activations: AtomicU64::new(0),
        }
    }

    fn next_chain_id(&self) -> ChainId {
        let id = match self.mode {
            ClockMode::Simulated => {
                format!("chain-{:04}", self.chains.fetch_add(1, Ordering::Relaxed) + 1)
            }
            ClockMode::Real => format!("chain-{}", uuid::Uuid::new_v4().simple()),
        };
        ChainId::new(id).unwrap()
    }

    fn next_activation_id(&self) -> String {
        match self.mode {
            ClockMode::Simulated => {
                format!("act-{:06}", self.activations.fetch_add(1, Ordering::Relaxed) + 1)
            }
            ClockMode::Real => format!("act-{}", uuid::Uuid::new_v4().simple()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trilemma {
    pub double_billing_violated: bool,
    pub substitution_satisfied: bool,
}

/// Billing and invocation summary of one settled chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub chain_id: ChainId,
    pub status: ChainStatus,
    pub invocation_count: u32,
    pub total_billed_ms: u64,
    /// Pure work time summed over the chain — what a single uninterrupted
    /// execution would have cost.
    pub single_shot_ms_estimate: u64,
    pub double_billed_ms: u64,
    pub trilemma: Trilemma,
    /// Chain wall time: last activation end minus first activation start.
    pub execution_ms: u64,
    pub checkpoint_ms_total: u64,
    pub upload_ms_total: u64,
    pub duplicate_finals: u32,
}

/// Reply to an invoke request. `outcome` is present for blocking invokes.
#[derive(Debug, Clone)]
pub struct InvokeReply {
    pub activation_id: String,
    pub outcome: Option<InvocationOutcome>,
}

pub struct Gateway {
    self_ref: Weak<Gateway>,
    clock: Arc<dyn Clock>,
    cooperative: CooperativeCheckpointer,
    external: Option<ExternalAdapter>,
    ckpt_repo: Arc<dyn CheckpointRepo>,
    results: Arc<dyn ResultsRepo>,
    log: Arc<RunLog>,
    scratch_dir: PathBuf,
    ids: IdMinter,
    actions: Mutex<HashMap<String, RegisteredAction>>,
    queue: Mutex<VecDeque<QueuedActivation>>,
    driving: Mutex<Option<std::thread::ThreadId>>,
    records: Mutex<Vec<ActivationRecord>>,
    meta: Mutex<HashMap<String, ActivationMeta>>,
    chain_activations: Mutex<HashMap<ChainId, Vec<String>>>,
    in_flight: Mutex<HashMap<String, u32>>,
    threads: Mutex<Vec<std::thread::JoinHandle<()>>>,
}

pub struct GatewayBuilder {
    clock: Arc<dyn Clock>,
    mode: ClockMode,
    registry: Arc<WorkloadRegistry>,
    repos: Option<(Arc<dyn CheckpointRepo>, Arc<dyn ResultsRepo>)>,
    log: Option<RunLog>,
    external: Option<ExternalAdapter>,
    scratch_dir: Option<PathBuf>,
    checkpoint_cost_ms: u64,
}

static SCRATCH_COUNTER: AtomicU64 = AtomicU64::new(0);

impl GatewayBuilder {
    pub fn new(mode: ClockMode) -> Self {
        GatewayBuilder {
            clock: clock_for(mode),
            mode,
            registry: WorkloadRegistry::standard(),
            repos: None,
            log: None,
            external: None,
            scratch_dir: None,
            checkpoint_cost_ms: 0,
        }
    }

    /// The clock this gateway will run on; useful for wiring stub stores to
    /// the same time source.
    pub fn clock_handle(&self) -> Arc<dyn Clock> {
        self.clock.clone()
    }

    pub fn registry(mut self, registry: Arc<WorkloadRegistry>) -> Self {
        self.registry = registry;
        self
    }

    pub fn repos(
        mut self,
        ckpt: Arc<dyn CheckpointRepo>,
        results: Arc<dyn ResultsRepo>,
    ) -> Self {
        self.repos = Some((ckpt, results));
        self
    }

    pub fn repo_config(mut self, cfg: &RepoConfig) -> Result<Self, StoreError> {
        let (ckpt, results) = crate::stores::open_repos(cfg, self.clock.clone())?;
        self.repos = Some((ckpt, results));
        Ok(self)
    }

    pub fn log(mut self, log: RunLog) -> Self {
        self.log = Some(log);
        self
    }

    pub fn external(mut self, adapter: ExternalAdapter) -> Self {
        self.external = Some(adapter);
        self
    }

    pub fn scratch_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.scratch_dir = Some(dir.into());
        self
    }

    /// Simulated dump cost charged by the cooperative checkpointer.
    pub fn checkpoint_cost_ms(mut self, ms: u64) -> Self {
        self.checkpoint_cost_ms = ms;
        self
    }

    pub fn build(self) -> Arc<Gateway> {
        let (ckpt_repo, results) = self.repos.unwrap_or_else(|| {
            (
                Arc::new(crate::stores::MemoryCheckpointRepo::new()),
                Arc::new(crate::stores::MemoryResultsRepo::new()),
            )
        });
        let scratch_dir = self.scratch_dir.unwrap_or_else(|| {
            std::env::temp_dir().join(format!(
                "ckptchain-gw-{}-{}",
                std::process::id(),
                SCRATCH_COUNTER.fetch_add(1, Ordering::Relaxed)
            ))
        });
        let cooperative = CooperativeCheckpointer::new(self.registry.clone())
            .with_cost_ms(self.checkpoint_cost_ms);
        Arc::new_cyclic(|self_ref| Gateway {
            self_ref: self_ref.clone(),
            clock: self.clock,
            cooperative,
            external: self.external,
            ckpt_repo,
            results,
            log: Arc::new(self.log.unwrap_or_else(RunLog::null)),
            scratch_dir,
            ids: IdMinter::new(self.mode),
            actions: Mutex::new(HashMap::new()),
            queue: Mutex::new(VecDeque::new()),
            driving: Mutex::new(None),
            records: Mutex::new(Vec::new()),
            meta: Mutex::new(HashMap::new()),
            chain_activations: Mutex::new(HashMap::new()),
            in_flight: Mutex::new(HashMap::new()),
            threads: Mutex::new(Vec::new()),
        })
    }
}

struct GatewayInvoker {
    gateway: Weak<Gateway>,
    action: String,
}

impl Invoker for GatewayInvoker {
    fn invoke_next(&self, params: serde_json::Value) -> Result<String, InvokeError> {
        let gw = self
            .gateway
            .upgrade()
            .ok_or_else(|| InvokeError("gateway shut down".into()))?;
        gw.invoke(&self.action, params, false)
            .map(|r| r.activation_id)
            .map_err(|e| InvokeError(e.to_string()))
    }
}

impl Gateway {
    pub fn builder(mode: ClockMode) -> GatewayBuilder {
        GatewayBuilder::new(mode)
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn results(&self) -> &Arc<dyn ResultsRepo> {
        &self.results
    }

    pub fn checkpoints(&self) -> &Arc<dyn CheckpointRepo> {
        &self.ckpt_repo
    }

    pub fn register_action(&self, config: ActionConfig) -> Result<(), GatewayError> {
        config.validate()?;
        let mut actions = self.actions.lock().unwrap();
        actions.insert(
            config.name.clone(),
            RegisteredAction {
                config,
                target: Target::InProcess,
            },
        );
        Ok(())
    }

    /// Registers an action whose activations execute on a remote
    /// action-interface server instead of in-process.
    pub fn register_remote_action(
        &self,
        config: ActionConfig,
        remote: Arc<dyn RemoteAction>,
    ) -> Result<(), GatewayError> {
        config.validate()?;
        if self.clock.mode() != ClockMode::Real {
            return Err(GatewayError::Unsupported(
                "remote actions require a real clock".into(),
            ));
        }
        let mut actions = self.actions.lock().unwrap();
        actions.insert(
            config.name.clone(),
            RegisteredAction {
                config,
                target: Target::Remote(remote),
            },
        );
        Ok(())
    }

    /// Invokes an action. Non-blocking returns as soon as the activation id
    /// is minted (this is the runner's re-invocation path); blocking waits
    /// for this invocation's own outcome, not the chain's.
    pub fn invoke(
        &self,
        action: &str,
        params: serde_json::Value,
        blocking: bool,
    ) -> Result<InvokeReply, GatewayError> {
        let limit = {
            let actions = self.actions.lock().unwrap();
            let entry = actions
                .get(action)
                .ok_or_else(|| GatewayError::UnknownAction(action.to_string()))?;
            entry.config.concurrency_limit
        };

        let activation_id = self.ids.next_activation_id();
        match self.clock.mode() {
            ClockMode::Simulated => {
                self.queue.lock().unwrap().push_back(QueuedActivation {
                    activation_id: activation_id.clone(),
                    action: action.to_string(),
                    params,
                });
                let me = std::thread::current().id();
                let is_nested = *self.driving.lock().unwrap() == Some(me);
                if is_nested {
                    if blocking {
                        return Err(GatewayError::Unsupported(
                            "nested blocking invoke is not supported on a simulated clock".into(),
                        ));
                    }
                    return Ok(InvokeReply {
                        activation_id,
                        outcome: None,
                    });
                }
                struct DriveGuard<'a>(&'a Mutex<Option<std::thread::ThreadId>>);
                impl Drop for DriveGuard<'_> {
                    fn drop(&mut self) {
                        *self.0.lock().unwrap() = None;
                    }
                }
                *self.driving.lock().unwrap() = Some(me);
                let _guard = DriveGuard(&self.driving);
                loop {
                    // bind first: the queue guard must drop before running
                    let item = self.queue.lock().unwrap().pop_front();
                    match item {
                        Some(item) => self.run_activation(item),
                        None => break,
                    }
                }
                let outcome = blocking
                    .then(|| {
                        self.meta
                            .lock()
                            .unwrap()
                            .get(&activation_id)
                            .map(|m| m.outcome.clone())
                    })
                    .flatten();
                Ok(InvokeReply {
                    activation_id,
                    outcome,
                })
            }
            ClockMode::Real => {
                {
                    let mut in_flight = self.in_flight.lock().unwrap();
                    let n = in_flight.entry(action.to_string()).or_insert(0);
                    if *n >= limit {
                        return Err(GatewayError::Throttled {
                            action: action.to_string(),
                            limit,
                        });
                    }
                    *n += 1;
                }
                let item = QueuedActivation {
                    activation_id: activation_id.clone(),
                    action: action.to_string(),
                    params,
                };
                if blocking {
                    self.run_activation(item);
                    self.release(action);
                    let outcome = self
                        .meta
                        .lock()
                        .unwrap()
                        .get(&activation_id)
                        .map(|m| m.outcome.clone());
                    Ok(InvokeReply {
                        activation_id,
                        outcome,
                    })
                } else {
                    let gw = self
                        .self_ref
                        .upgrade()
                        .expect("gateway alive during invoke");
                    let handle = std::thread::spawn(move || {
                        let action = item.action.clone();
                        gw.run_activation(item);
                        gw.release(&action);
                    });
                    self.threads.lock().unwrap().push(handle);
                    Ok(InvokeReply {
                        activation_id,
                        outcome: None,
                    })
                }
            }
        }
    }

    fn release(&self, action: &str) {
        let mut in_flight = self.in_flight.lock().unwrap();
        if let Some(n) = in_flight.get_mut(action) {
            *n = n.saturating_sub(1);
        }
    }

    /// Waits for all detached activation threads (real mode).
    pub fn join_background(&self) {
        loop {
            let handle = self.threads.lock().unwrap().pop();
            match handle {
                Some(h) => {
                    let _ = h.join();
                }
                None => break,
            }
        }
    }

    fn run_activation(&self, item: QueuedActivation) {
        let (config, target) = {
            let actions = self.actions.lock().unwrap();
            match actions.get(&item.action) {
                Some(entry) => (
                    entry.config.clone(),
                    match &entry.target {
                        Target::InProcess => None,
                        Target::Remote(r) => Some(r.clone()),
                    },
                ),
                None => return,
            }
        };
        let start = self.clock.now_ms();
        let digest = params_digest(&item.params);

        let outcome = match &target {
            None => self.run_in_process(&item, &config),
            Some(remote) => self.run_remote(&item, &config, remote.as_ref()),
        };

        let end = self.clock.now_ms();
        // platform timeout enforcement on the record: a killed activation is
        // charged the full slot and never spans past its deadline
        let (platform_outcome, billed_ms, end) = match &outcome {
            Ok(o) if o.killed_by_deadline => (
                ActivationOutcome::TimeoutKilled,
                config.timeout_ms,
                start + config.timeout_ms,
            ),
            Ok(o) if o.kind == OutcomeKind::Failed => (
                ActivationOutcome::Error,
                (end - start).min(config.timeout_ms),
                end.min(start + config.timeout_ms),
            ),
            Ok(_) => (
                ActivationOutcome::Success,
                (end - start).min(config.timeout_ms),
                end.min(start + config.timeout_ms),
            ),
            Err(_) => (ActivationOutcome::Error, (end - start).min(config.timeout_ms), end),
        };

        let record = ActivationRecord {
            activation_id: item.activation_id.clone(),
            action_name: item.action.clone(),
            start,
            end,
            outcome: platform_outcome,
            billed_ms,
            params_digest: digest,
        };
        self.records.lock().unwrap().push(record);

        if let Ok(outcome) = outcome {
            self.chain_activations
                .lock()
                .unwrap()
                .entry(outcome.chain_id.clone())
                .or_default()
                .push(item.activation_id.clone());
            self.meta.lock().unwrap().insert(
                item.activation_id,
                ActivationMeta {
                    outcome,
                    params: item.params,
                },
            );
        }
    }

    fn run_in_process(
        &self,
        item: &QueuedActivation,
        config: &ActionConfig,
    ) -> Result<InvocationOutcome, String> {
        let decoded = decode_params(&item.params).map_err(|e| e.to_string())?;
        let chain_id = decoded
            .chain_id
            .unwrap_or_else(|| self.ids.next_chain_id());
        let seq = decoded.seq.unwrap_or(1);
        // the trigger value is irrelevant when checkpointing is disabled but
        // must still satisfy the context invariant
        let trigger = if config.chained {
            config.runner.checkpoint_trigger_ms
        } else {
            config
                .runner
                .checkpoint_trigger_ms
                .min(config.timeout_ms - 1)
                .max(1)
        };
        let ctx = InvocationContext {
            chain_id,
            seq,
            spec: decoded.spec,
            timeout_ms: config.timeout_ms,
            checkpoint_trigger_ms: trigger,
            activation_id: Some(item.activation_id.clone()),
        };
        let runner_config = RunnerConfig {
            checkpointing_enabled: config.chained && config.runner.checkpointing_enabled,
            ..config.runner
        };
        let invoker = GatewayInvoker {
            gateway: self.self_ref.clone(),
            action: item.action.clone(),
        };
        let deps = RunnerDeps {
            cooperative: &self.cooperative,
            external: self.external.as_ref(),
            ckpt_repo: self.ckpt_repo.as_ref(),
            results: self.results.as_ref(),
            invoker: &invoker,
            clock: self.clock.as_ref(),
            log: &self.log,
            scratch_dir: &self.scratch_dir,
        };
        Ok(execute_invocation(&ctx, &runner_config, &deps))
    }

    fn run_remote(
        &self,
        item: &QueuedActivation,
        config: &ActionConfig,
        remote: &dyn RemoteAction,
    ) -> Result<InvocationOutcome, String> {
        let deadline_epoch = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64 + config.timeout_ms)
            .unwrap_or(config.timeout_ms);
        let payload = serde_json::json!({
            "value": item.params,
            "activation_id": item.activation_id,
            "deadline": deadline_epoch,
        });
        let response = remote.run(payload)?;
        if let Some(result) = response.get("result") {
            return serde_json::from_value::<InvocationOutcome>(result.clone())
                .map_err(|e| format!("malformed run response: {e}"));
        }
        match response.get("error") {
            // failed invocations arrive as an error object carrying the
            // structured outcome, so billing and kill accounting still work
            Some(err) => match err.get("outcome") {
                Some(outcome) => serde_json::from_value::<InvocationOutcome>(outcome.clone())
                    .map_err(|e| format!("malformed error outcome: {e}")),
                None => Err(err.to_string()),
            },
            None => Err("run response had neither result nor error".into()),
        }
    }

    pub fn activation(&self, id: &str) -> Option<ActivationRecord> {
        self.records
            .lock()
            .unwrap()
            .iter()
            .find(|r| r.activation_id == id)
            .cloned()
    }

    pub fn activations(&self) -> Vec<ActivationRecord> {
        self.records.lock().unwrap().clone()
    }

    pub fn activations_for_chain(&self, chain: &ChainId) -> Vec<ActivationRecord> {
        let ids = self
            .chain_activations
            .lock()
            .unwrap()
            .get(chain)
            .cloned()
            .unwrap_or_default();
        let records = self.records.lock().unwrap();
        ids.iter()
            .filter_map(|id| records.iter().find(|r| &r.activation_id == id).cloned())
            .collect()
    }

    /// Runner outcome of one activation (includes timings).
    pub fn outcome(&self, activation_id: &str) -> Option<InvocationOutcome> {
        self.meta
            .lock()
            .unwrap()
            .get(activation_id)
            .map(|m| m.outcome.clone())
    }

    /// Raw request parameters of one activation, for diagnostics.
    pub fn activation_params(&self, activation_id: &str) -> Option<serde_json::Value> {
        self.meta
            .lock()
            .unwrap()
            .get(activation_id)
            .map(|m| m.params.clone())
    }

    /// Billing and trilemma report for a settled chain.
    pub fn chain_report(&self, chain: &ChainId) -> Result<ChainReport, GatewayError> {
        let rec = self
            .results
            .get_chain(chain)?
            .ok_or_else(|| GatewayError::UnknownChain(chain.clone()))?;
        if rec.status == ChainStatus::Running {
            return Err(GatewayError::ChainRunning(chain.clone()));
        }
        let activations = self.activations_for_chain(chain);
        let total_billed_ms: u64 = activations.iter().map(|a| a.billed_ms).sum();
        let execution_ms = match (
            activations.iter().map(|a| a.start).min(),
            activations.iter().map(|a| a.end).max(),
        ) {
            (Some(first), Some(last)) => last - first,
            _ => 0,
        };
        let meta = self.meta.lock().unwrap();
        let mut single_shot_ms_estimate = 0;
        let mut checkpoint_ms_total = 0;
        let mut upload_ms_total = 0;
        for a in &activations {
            if let Some(m) = meta.get(&a.activation_id) {
                single_shot_ms_estimate += m.outcome.timings.work_ms;
                checkpoint_ms_total += m.outcome.timings.checkpoint_ms;
                upload_ms_total += m.outcome.timings.upload_ms;
            }
        }
        Ok(ChainReport {
            chain_id: chain.clone(),
            status: rec.status,
            invocation_count: rec.invocation_count,
            total_billed_ms,
            single_shot_ms_estimate,
            double_billed_ms: total_billed_ms.saturating_sub(single_shot_ms_estimate),
            trilemma: Trilemma {
                double_billing_violated: rec.invocation_count > 1,
                substitution_satisfied: rec.invocation_count == 1,
            },
            execution_ms,
            checkpoint_ms_total,
            upload_ms_total,
            duplicate_finals: rec.duplicate_finals(),
        })
    }
}
