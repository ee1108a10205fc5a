//! Shared domain types and pure helpers.
//!
//! Every type here is an immutable value with a canonical JSON encoding
//! (snake_case field names, declaration order). Those encodings are the wire
//! and file format for every other module: invocation parameters, checkpoint
//! manifests, chain records, and activation records all round-trip through
//! them losslessly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Platform ceiling for an action timeout, in milliseconds.
pub const PLATFORM_MAX_TIMEOUT_MS: u64 = 300_000;

/// Default action timeout, in milliseconds.
pub const DEFAULT_TIMEOUT_MS: u64 = 60_000;

/// Default instant at which the checkpoint timer fires, in milliseconds
/// from receipt of the run request.
pub const DEFAULT_TRIGGER_MS: u64 = 50_000;

/// Platform ceiling for action memory, in MiB.
pub const PLATFORM_MAX_MEMORY_MB: u64 = 512;

/// Default action memory, in MiB.
pub const DEFAULT_MEMORY_MB: u64 = 256;

/// Reserved invocation parameter carrying the chain identity.
pub const PARAM_CHAIN_ID: &str = "__chain_id";

/// Reserved invocation parameter carrying the 1-based sequence number.
pub const PARAM_SEQ: &str = "__seq";

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("chain id must be a non-empty URL-safe string, got {0:?}")]
    InvalidChainId(String),
    #[error("seq must be >= 1")]
    InvalidSeq,
    #[error("checkpoint trigger must satisfy 0 < trigger < timeout (trigger={trigger_ms}, timeout={timeout_ms})")]
    InvalidTrigger { trigger_ms: u64, timeout_ms: u64 },
    #[error("timeout {0} ms exceeds platform maximum {PLATFORM_MAX_TIMEOUT_MS} ms")]
    TimeoutAboveMax(u64),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

/// Identity of one chain of same-function invocations.
///
/// Minted once when a workload is first submitted and propagated unchanged to
/// every subsequent invocation of that chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainId(String);

impl ChainId {
    /// Validates that `value` is non-empty and URL-safe
    /// (`[A-Za-z0-9_-]` only).
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let ok = !value.is_empty()
            && value
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
        if ok {
            Ok(ChainId(value))
        } else {
            Err(ModelError::InvalidChainId(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for ChainId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// How a workload executes: stepped in-process under the cooperative state
/// contract, or as a child process managed by an external checkpoint tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ExecMode {
    #[default]
    #[serde(rename = "cooperative")]
    Cooperative,
    #[serde(rename = "external-process")]
    ExternalProcess,
}

/// What to run: a registered workload name plus its arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub bin: String,
    pub bin_args: Vec<String>,
    #[serde(default)]
    pub mode: ExecMode,
    #[serde(default)]
    pub env: BTreeMap<String, String>,
}

impl WorkloadSpec {
    pub fn new(bin: impl Into<String>, bin_args: Vec<String>) -> Self {
        WorkloadSpec {
            bin: bin.into(),
            bin_args,
            mode: ExecMode::Cooperative,
            env: BTreeMap::new(),
        }
    }
}

/// Identity of one link in a chain: which chain, which position, what to run,
/// and the deadlines in force for this slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvocationContext {
    pub chain_id: ChainId,
    /// 1-based position in the chain; the first invocation has seq 1.
    pub seq: u32,
    pub spec: WorkloadSpec,
    pub timeout_ms: u64,
    pub checkpoint_trigger_ms: u64,
    /// Assigned by the gateway on invoke; absent until then.
    pub activation_id: Option<String>,
}

impl InvocationContext {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.seq < 1 {
            return Err(ModelError::InvalidSeq);
        }
        if self.timeout_ms > PLATFORM_MAX_TIMEOUT_MS {
            return Err(ModelError::TimeoutAboveMax(self.timeout_ms));
        }
        if self.checkpoint_trigger_ms == 0 || self.checkpoint_trigger_ms >= self.timeout_ms {
            return Err(ModelError::InvalidTrigger {
                trigger_ms: self.checkpoint_trigger_ms,
                timeout_ms: self.timeout_ms,
            });
        }
        Ok(())
    }

    /// The context of the successor invocation: identical except `seq` is
    /// incremented and the activation id is cleared (the gateway assigns a
    /// fresh one on invoke).
    pub fn advance(&self) -> InvocationContext {
        InvocationContext {
            chain_id: self.chain_id.clone(),
            seq: self.seq + 1,
            spec: self.spec.clone(),
            timeout_ms: self.timeout_ms,
            checkpoint_trigger_ms: self.checkpoint_trigger_ms,
            activation_id: None,
        }
    }
}

/// One file captured by a checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub relative_path: String,
    pub size_bytes: u64,
    pub sha256_hex: String,
}

/// How to resume from a checkpoint image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode")]
pub enum RestartDescriptor {
    /// Resume by parsing the serialized cooperative state file.
    #[serde(rename = "cooperative")]
    Cooperative { state_key: String },
    /// Resume by executing the tool-generated restart script against the
    /// downloaded image files.
    #[serde(rename = "external-process")]
    ExternalProcess {
        restart_script: String,
        image_files: Vec<String>,
    },
}

/// Content-addressed description of one checkpoint image.
///
/// At most one manifest exists per `(chain_id, seq)`; the latest checkpoint
/// of a chain is the one with the highest seq.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointManifest {
    pub chain_id: ChainId,
    /// Sequence number of the invocation that wrote this checkpoint.
    pub seq: u32,
    /// Milliseconds on the active clock when the checkpoint was taken.
    pub created_at: u64,
    pub files: Vec<FileEntry>,
    pub restart: RestartDescriptor,
}

impl CheckpointManifest {
    /// Total bytes of all files listed in the manifest.
    pub fn total_bytes(&self) -> u64 {
        self.files.iter().map(|f| f.size_bytes).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainStatus {
    Running,
    Completed,
    Failed,
}

/// One intermediate result posted by a workload mid-run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partial {
    pub seq: u32,
    pub payload: serde_json::Value,
}

/// A final result accepted for a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalResult {
    pub payload: serde_json::Value,
    pub finished_at: u64,
    pub winner_seq: u32,
}

/// A finalize attempt that lost the fence; its payload is logged by the
/// caller but deliberately not stored as a result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedFinal {
    pub seq: u32,
    pub rejected_at: u64,
}

/// Authoritative per-chain state in the results repository.
///
/// `final` is the first final result written. With fencing enabled it is also
/// the only one: later attempts land in `rejected_finals`. With fencing
/// disabled every finalize is stored, the first in `final` and the rest in
/// `extra_finals` — which is exactly the duplicate-result behavior the race
/// configuration reproduces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub chain_id: ChainId,
    pub status: ChainStatus,
    pub partials: Vec<Partial>,
    #[serde(rename = "final")]
    pub final_result: Option<FinalResult>,
    #[serde(default)]
    pub extra_finals: Vec<FinalResult>,
    #[serde(default)]
    pub rejected_finals: Vec<RejectedFinal>,
    /// Number of distinct seq values observed for this chain.
    pub invocation_count: u32,
    /// The distinct seq values behind `invocation_count`, in arrival order.
    #[serde(default)]
    pub seen_seqs: Vec<u32>,
    #[serde(default)]
    pub failure_reason: Option<String>,
}

impl ChainRecord {
    pub fn new(chain_id: ChainId) -> Self {
        ChainRecord {
            chain_id,
            status: ChainStatus::Running,
            partials: Vec::new(),
            final_result: None,
            extra_finals: Vec::new(),
            rejected_finals: Vec::new(),
            invocation_count: 0,
            seen_seqs: Vec::new(),
            failure_reason: None,
        }
    }

    /// Count of final results recorded when more than one exists, else 0.
    /// Nonzero only when fencing was off and a duplicate execution landed.
    pub fn duplicate_finals(&self) -> u32 {
        let total = self.final_result.iter().count() + self.extra_finals.len();
        if total > 1 {
            total as u32
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationOutcome {
    Success,
    TimeoutKilled,
    Error,
}

/// Per-invocation record kept by the gateway.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationRecord {
    pub activation_id: String,
    pub action_name: String,
    pub start: u64,
    pub end: u64,
    pub outcome: ActivationOutcome,
    /// Milliseconds charged for this activation. A timeout kill charges the
    /// full slot, so `billed_ms >= timeout_ms` in that case.
    pub billed_ms: u64,
    /// SHA-256 of the canonical JSON encoding of the request parameters.
    pub params_digest: String,
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// Digest of a JSON value's canonical encoding (sorted object keys).
pub fn params_digest(params: &serde_json::Value) -> String {
    sha256_hex(params.to_string().as_bytes())
}

/// Source of blob bytes for manifest verification and restore.
///
/// `Ok(None)` means the blob is absent, which is distinct from a backend
/// failure.
pub trait BlobFetch {
    fn fetch(&self, relative_path: &str) -> std::io::Result<Option<Vec<u8>>>;
}

/// Per-file outcome of a manifest verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileCheck {
    pub relative_path: String,
    pub ok: bool,
    pub reason: Option<String>,
}

/// Result of checking every file of a manifest against stored bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub files: Vec<FileCheck>,
    pub pass: bool,
}

/// Recomputes every file digest in `manifest` against bytes from `blobs`.
///
/// Never fails: a missing blob marks that file failed with reason "absent",
/// a read error marks it failed with the error text. The overall report
/// passes iff every digest matches. A manifest with no files passes
/// vacuously.
pub fn verify_manifest(manifest: &CheckpointManifest, blobs: &dyn BlobFetch) -> VerificationReport {
    let mut files = Vec::with_capacity(manifest.files.len());
    for entry in &manifest.files {
        let check = match blobs.fetch(&entry.relative_path) {
            Ok(Some(bytes)) => {
                let digest = sha256_hex(&bytes);
                if digest == entry.sha256_hex && bytes.len() as u64 == entry.size_bytes {
                    FileCheck {
                        relative_path: entry.relative_path.clone(),
                        ok: true,
                        reason: None,
                    }
                } else {
                    FileCheck {
                        relative_path: entry.relative_path.clone(),
                        ok: false,
                        reason: Some(format!(
                            "digest mismatch: expected {}, got {}",
                            entry.sha256_hex, digest
                        )),
                    }
                }
            }
            Ok(None) => FileCheck {
                relative_path: entry.relative_path.clone(),
                ok: false,
                reason: Some("absent".to_string()),
            },
            Err(e) => FileCheck {
                relative_path: entry.relative_path.clone(),
                ok: false,
                reason: Some(format!("read error: {e}")),
            },
        };
        files.push(check);
    }
    let pass = files.iter().all(|f| f.ok);
    VerificationReport { files, pass }
}

/// Invocation parameters split into the workload spec and the reserved chain
/// parameters, if present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedParams {
    pub spec: WorkloadSpec,
    pub chain_id: Option<ChainId>,
    pub seq: Option<u32>,
}

/// Decodes a parameter object into a [`WorkloadSpec`] plus optional chain
/// parameters. Reserved keys are stripped from the spec so the workload only
/// sees its own arguments.
///
/// `bin_args` entries may arrive as JSON strings, numbers, or booleans; all
/// are carried as their string form, which is what a command line would see.
pub fn decode_params(params: &serde_json::Value) -> Result<DecodedParams, ModelError> {
    let obj = params
        .as_object()
        .ok_or_else(|| ModelError::BadParams("parameters must be a JSON object".into()))?;

    let bin = obj
        .get("bin")
        .and_then(|v| v.as_str())
        .ok_or_else(|| ModelError::BadParams("missing string parameter `bin`".into()))?
        .to_string();

    let bin_args = match obj.get("bin_args") {
        None => Vec::new(),
        Some(serde_json::Value::Array(items)) => {
            let mut args = Vec::with_capacity(items.len());
            for item in items {
                match item {
                    serde_json::Value::String(s) => args.push(s.clone()),
                    serde_json::Value::Number(n) => args.push(n.to_string()),
                    serde_json::Value::Bool(b) => args.push(b.to_string()),
                    other => {
                        return Err(ModelError::BadParams(format!(
                            "unsupported bin_args entry: {other}"
                        )))
                    }
                }
            }
            args
        }
        Some(other) => {
            return Err(ModelError::BadParams(format!(
                "bin_args must be a list, got {other}"
            )))
        }
    };

    let mode = match obj.get("mode") {
        None => ExecMode::Cooperative,
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| ModelError::BadParams(format!("bad mode: {e}")))?,
    };

    let env = match obj.get("env") {
        None => BTreeMap::new(),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| ModelError::BadParams(format!("bad env: {e}")))?,
    };

    let chain_id = match obj.get(PARAM_CHAIN_ID) {
        None => None,
        Some(v) => {
            let s = v.as_str().ok_or_else(|| {
                ModelError::BadParams(format!("{PARAM_CHAIN_ID} must be a string"))
            })?;
            Some(ChainId::new(s)?)
        }
    };

    let seq = match obj.get(PARAM_SEQ) {
        None => None,
        Some(v) => {
            let n = v
                .as_u64()
                .filter(|&n| n >= 1 && n <= u32::MAX as u64)
                .ok_or_else(|| {
                    ModelError::BadParams(format!("{PARAM_SEQ} must be a positive integer"))
                })?;
            Some(n as u32)
        }
    };

    Ok(DecodedParams {
        spec: WorkloadSpec {
            bin,
            bin_args,
            mode,
            env,
        },
        chain_id,
        seq,
    })
}

/// Encodes a context back into the invocation parameter object, reserved
/// chain parameters included. Inverse of [`decode_params`] for contexts that
/// came from parameters.
pub fn encode_params(ctx: &InvocationContext) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    obj.insert("bin".into(), serde_json::Value::String(ctx.spec.bin.clone()));
    obj.insert(
        "bin_args".into(),
        serde_json::Value::Array(
            ctx.spec
                .bin_args
                .iter()
                .map(|a| serde_json::Value::String(a.clone()))
                .collect(),
        ),
    );
    obj.insert("mode".into(), serde_json::to_value(ctx.spec.mode).unwrap());
    if !ctx.spec.env.is_empty() {
        obj.insert("env".into(), serde_json::to_value(&ctx.spec.env).unwrap());
    }
    obj.insert(
        PARAM_CHAIN_ID.into(),
        serde_json::Value::String(ctx.chain_id.as_str().to_string()),
    );
    obj.insert(PARAM_SEQ.into(), serde_json::Value::from(ctx.seq));
    serde_json::Value::Object(obj)
}
