//! Checkpoint repository and results repository.
//!
//! Three interchangeable backends: `memory` (tests, simulation), `local_fs`
//! (durable desk-scale deployments, shared between processes), and
//! `stub_remote` (wraps another backend and charges transfer latency on the
//! active clock, standing in for remote object storage).
//!
//! Checkpoints are versioned by seq and never overwritten; the latest
//! checkpoint of a chain is the one with the highest seq. The local
//! filesystem backend commits with write-temp-then-rename so a manifest is
//! visible only after all of its blobs are fully written. Per-chain results
//! updates are serialized (a mutex in memory, `flock` on disk), which is what
//! makes finalize an atomic first-writer-wins compare-and-set.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::os::fd::AsRawFd;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use crate::clock::Clock;
use crate::model::{
    BlobFetch, ChainId, ChainRecord, ChainStatus, CheckpointManifest, FinalResult, Partial,
    RejectedFinal,
};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("checkpoint for chain {chain} seq {seq} already exists")]
    Conflict { chain: ChainId, seq: u32 },
    #[error("corrupt: {0}")]
    Corrupt(String),
    #[error("unsafe relative path {0:?}")]
    UnsafePath(String),
    #[error("storage i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("storage backend: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalizeOutcome {
    Accepted,
    DuplicateRejected,
}

/// A located checkpoint: its manifest plus access to the stored blobs.
pub struct CheckpointHit {
    pub manifest: CheckpointManifest,
    pub blobs: Box<dyn BlobFetch + Send>,
}

/// Durable store of checkpoint images, keyed by (chain, seq).
pub trait CheckpointRepo: Send + Sync {
    /// Stores the manifest and every file it lists (read from `blob_dir`).
    /// Returns the stored manifest key. Fails with `Conflict` if a manifest
    /// for this (chain, seq) already exists.
    fn put(&self, manifest: &CheckpointManifest, blob_dir: &Path) -> Result<String, StoreError>;

    /// Highest-seq manifest for the chain, or `None` when the chain has no
    /// checkpoint. A stored-but-unreadable manifest is `Corrupt`, which is
    /// deliberately distinct from absent.
    fn get_latest(&self, chain: &ChainId) -> Result<Option<CheckpointHit>, StoreError>;
}

/// Authoritative per-chain results: partials, the fenced final, failures.
pub trait ResultsRepo: Send + Sync {
    /// Records that invocation `seq` of the chain started. Idempotent per
    /// (chain, seq); the record's invocation_count counts distinct seqs.
    fn record_invocation(&self, chain: &ChainId, seq: u32) -> Result<(), StoreError>;

    /// Appends a partial result in arrival order. Idempotent on identical
    /// (seq, payload) pairs.
    fn put_partial(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
    ) -> Result<(), StoreError>;

    /// Writes a final result. With `fencing` this is an atomic first-writer
    /// wins: the first call stores the final, later calls are recorded as
    /// rejected duplicates and their payload is not stored. Without fencing
    /// every call stores a final entry (first in `final`, rest in
    /// `extra_finals`).
    fn finalize(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
        finished_at: u64,
        fencing: bool,
    ) -> Result<FinalizeOutcome, StoreError>;

    /// Marks the chain failed unless a final result was already accepted.
    fn mark_failed(&self, chain: &ChainId, reason: &str) -> Result<(), StoreError>;

    fn get_chain(&self, chain: &ChainId) -> Result<Option<ChainRecord>, StoreError>;
}

fn check_rel_path(path: &str) -> Result<(), StoreError> {
    let p = Path::new(path);
    let bad = path.is_empty()
        || p.is_absolute()
        || p.components()
            .any(|c| matches!(c, std::path::Component::ParentDir | std::path::Component::RootDir));
    if bad {
        return Err(StoreError::UnsafePath(path.to_string()));
    }
    Ok(())
}

// Shared record-update logic so every backend behaves identically.

fn apply_invocation(rec: &mut ChainRecord, seq: u32) {
    if !rec.seen_seqs.contains(&seq) {
        rec.seen_seqs.push(seq);
        rec.invocation_count = rec.seen_seqs.len() as u32;
    }
}

fn apply_partial(rec: &mut ChainRecord, seq: u32, payload: &serde_json::Value) {
    let p = Partial {
        seq,
        payload: payload.clone(),
    };
    if !rec.partials.contains(&p) {
        rec.partials.push(p);
    }
}

fn apply_finalize(
    rec: &mut ChainRecord,
    seq: u32,
    payload: &serde_json::Value,
    finished_at: u64,
    fencing: bool,
) -> FinalizeOutcome {
    let entry = FinalResult {
        payload: payload.clone(),
        finished_at,
        winner_seq: seq,
    };
    if rec.final_result.is_none() {
        rec.final_result = Some(entry);
        rec.status = ChainStatus::Completed;
        rec.failure_reason = None;
        FinalizeOutcome::Accepted
    } else if fencing {
        rec.rejected_finals.push(RejectedFinal {
            seq,
            rejected_at: finished_at,
        });
        FinalizeOutcome::DuplicateRejected
    } else {
        rec.extra_finals.push(entry);
        FinalizeOutcome::Accepted
    }
}

fn apply_failure(rec: &mut ChainRecord, reason: &str) {
    if rec.final_result.is_none() {
        rec.status = ChainStatus::Failed;
        rec.failure_reason = Some(reason.to_string());
    }
}

// ---------------------------------------------------------------------------
// memory backend
// ---------------------------------------------------------------------------

type BlobMap = HashMap<String, Vec<u8>>;

struct MapBlobs(BlobMap);

impl BlobFetch for MapBlobs {
    fn fetch(&self, relative_path: &str) -> std::io::Result<Option<Vec<u8>>> {
        Ok(self.0.get(relative_path).cloned())
    }
}

#[derive(Default)]
pub struct MemoryCheckpointRepo {
    chains: Mutex<HashMap<ChainId, Vec<(CheckpointManifest, BlobMap)>>>,
}

impl MemoryCheckpointRepo {
    pub fn new() -> Self {
        Self::default()
    }
}

impl CheckpointRepo for MemoryCheckpointRepo {
    fn put(&self, manifest: &CheckpointManifest, blob_dir: &Path) -> Result<String, StoreError> {
        let mut blobs = BlobMap::new();
        for entry in &manifest.files {
            check_rel_path(&entry.relative_path)?;
            let bytes = fs::read(blob_dir.join(&entry.relative_path))?;
            blobs.insert(entry.relative_path.clone(), bytes);
        }
        let mut chains = self.chains.lock().unwrap();
        let versions = chains.entry(manifest.chain_id.clone()).or_default();
        if versions.iter().any(|(m, _)| m.seq == manifest.seq) {
            return Err(StoreError::Conflict {
                chain: manifest.chain_id.clone(),
                seq: manifest.seq,
            });
        }
        versions.push((manifest.clone(), blobs));
        Ok(format!("{}/{}", manifest.chain_id, manifest.seq))
    }

    fn get_latest(&self, chain: &ChainId) -> Result<Option<CheckpointHit>, StoreError> {
        let chains = self.chains.lock().unwrap();
        let Some(versions) = chains.get(chain) else {
            return Ok(None);
        };
        let hit = versions.iter().max_by_key(|(m, _)| m.seq);
        Ok(hit.map(|(m, blobs)| CheckpointHit {
            manifest: m.clone(),
            blobs: Box::new(MapBlobs(blobs.clone())),
        }))
    }
}

#[derive(Default)]
pub struct MemoryResultsRepo {
    chains: Mutex<HashMap<ChainId, ChainRecord>>,
}

impl MemoryResultsRepo {
    pub fn new() -> Self {
        Self::default()
    }

    fn update<T>(&self, chain: &ChainId, f: impl FnOnce(&mut ChainRecord) -> T) -> T {
        let mut chains = self.chains.lock().unwrap();
        let rec = chains
            .entry(chain.clone())
            .or_insert_with(|| ChainRecord::new(chain.clone()));
        f(rec)
    }
}

impl ResultsRepo for MemoryResultsRepo {
    fn record_invocation(&self, chain: &ChainId, seq: u32) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_invocation(rec, seq));
        Ok(())
    }

    fn put_partial(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
    ) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_partial(rec, seq, payload));
        Ok(())
    }

    fn finalize(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
        finished_at: u64,
        fencing: bool,
    ) -> Result<FinalizeOutcome, StoreError> {
        Ok(self.update(chain, |rec| {
            apply_finalize(rec, seq, payload, finished_at, fencing)
        }))
    }

    fn mark_failed(&self, chain: &ChainId, reason: &str) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_failure(rec, reason));
        Ok(())
    }

    fn get_chain(&self, chain: &ChainId) -> Result<Option<ChainRecord>, StoreError> {
        Ok(self.chains.lock().unwrap().get(chain).cloned())
    }
}

// ---------------------------------------------------------------------------
// local filesystem backend
// ---------------------------------------------------------------------------

/// Advisory exclusive lock on a lock file, released on drop.
struct FileLock {
    file: fs::File,
}

impl FileLock {
    fn acquire(path: &Path) -> std::io::Result<FileLock> {
        let file = fs::OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(path)?;
        let rc = unsafe { libc::flock(file.as_raw_fd(), libc::LOCK_EX) };
        if rc != 0 {
            return Err(std::io::Error::last_os_error());
        }
        Ok(FileLock { file })
    }
}

impl Drop for FileLock {
    fn drop(&mut self) {
        unsafe {
            libc::flock(self.file.as_raw_fd(), libc::LOCK_UN);
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Layout: `<root>/checkpoints/<chain>/<seq>/manifest.json` plus blob files,
/// `<root>/chains/<chain>.json` for chain records.
pub struct FsCheckpointRepo {
    root: PathBuf,
}

impl FsCheckpointRepo {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("checkpoints"))?;
        Ok(FsCheckpointRepo { root })
    }

    fn chain_dir(&self, chain: &ChainId) -> PathBuf {
        self.root.join("checkpoints").join(chain.as_str())
    }
}

struct DirBlobs(PathBuf);

impl BlobFetch for DirBlobs {
    fn fetch(&self, relative_path: &str) -> std::io::Result<Option<Vec<u8>>> {
        if check_rel_path(relative_path).is_err() {
            return Ok(None);
        }
        match fs::read(self.0.join(relative_path)) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }
}

impl CheckpointRepo for FsCheckpointRepo {
    fn put(&self, manifest: &CheckpointManifest, blob_dir: &Path) -> Result<String, StoreError> {
        let chain_dir = self.chain_dir(&manifest.chain_id);
        fs::create_dir_all(&chain_dir)?;
        let final_dir = chain_dir.join(manifest.seq.to_string());
        if final_dir.exists() {
            return Err(StoreError::Conflict {
                chain: manifest.chain_id.clone(),
                seq: manifest.seq,
            });
        }
        let tmp_dir = chain_dir.join(format!(".tmp-{}-{}", manifest.seq, std::process::id()));
        if tmp_dir.exists() {
            fs::remove_dir_all(&tmp_dir)?;
        }
        fs::create_dir_all(&tmp_dir)?;

        // blobs first, manifest last: the manifest's presence is the commit
        for entry in &manifest.files {
            check_rel_path(&entry.relative_path)?;
            let dst = tmp_dir.join(&entry.relative_path);
            if let Some(parent) = dst.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::copy(blob_dir.join(&entry.relative_path), &dst)?;
        }
        let encoded = serde_json::to_vec_pretty(manifest)
            .map_err(|e| StoreError::Backend(format!("encode manifest: {e}")))?;
        write_atomic(&tmp_dir.join("manifest.json"), &encoded)?;

        match fs::rename(&tmp_dir, &final_dir) {
            Ok(()) => {}
            Err(_) if final_dir.exists() => {
                let _ = fs::remove_dir_all(&tmp_dir);
                return Err(StoreError::Conflict {
                    chain: manifest.chain_id.clone(),
                    seq: manifest.seq,
                });
            }
            Err(e) => return Err(e.into()),
        }
        Ok(format!("{}/{}", manifest.chain_id, manifest.seq))
    }

    fn get_latest(&self, chain: &ChainId) -> Result<Option<CheckpointHit>, StoreError> {
        let chain_dir = self.chain_dir(chain);
        let entries = match fs::read_dir(&chain_dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let mut best: Option<u32> = None;
        for entry in entries {
            let entry = entry?;
            if let Some(seq) = entry.file_name().to_str().and_then(|n| n.parse::<u32>().ok()) {
                best = Some(best.map_or(seq, |b| b.max(seq)));
            }
        }
        let Some(seq) = best else { return Ok(None) };
        let seq_dir = chain_dir.join(seq.to_string());
        let raw = fs::read(seq_dir.join("manifest.json"))
            .map_err(|e| StoreError::Corrupt(format!("manifest for {chain}/{seq} unreadable: {e}")))?;
        let manifest: CheckpointManifest = serde_json::from_slice(&raw)
            .map_err(|e| StoreError::Corrupt(format!("manifest for {chain}/{seq} undecodable: {e}")))?;
        Ok(Some(CheckpointHit {
            manifest,
            blobs: Box::new(DirBlobs(seq_dir)),
        }))
    }
}

pub struct FsResultsRepo {
    root: PathBuf,
}

impl FsResultsRepo {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(root.join("chains"))?;
        Ok(FsResultsRepo { root })
    }

    fn record_path(&self, chain: &ChainId) -> PathBuf {
        self.root.join("chains").join(format!("{chain}.json"))
    }

    fn lock_path(&self, chain: &ChainId) -> PathBuf {
        self.root.join("chains").join(format!("{chain}.lock"))
    }

    /// Read-modify-write under an exclusive per-chain file lock, so updates
    /// are atomic across processes sharing the same root.
    fn update<T>(
        &self,
        chain: &ChainId,
        f: impl FnOnce(&mut ChainRecord) -> T,
    ) -> Result<T, StoreError> {
        let _lock = FileLock::acquire(&self.lock_path(chain))?;
        let path = self.record_path(chain);
        let mut rec = match fs::read(&path) {
            Ok(raw) => serde_json::from_slice(&raw)
                .map_err(|e| StoreError::Corrupt(format!("chain record {chain}: {e}")))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => ChainRecord::new(chain.clone()),
            Err(e) => return Err(e.into()),
        };
        let out = f(&mut rec);
        let encoded = serde_json::to_vec_pretty(&rec)
            .map_err(|e| StoreError::Backend(format!("encode chain record: {e}")))?;
        write_atomic(&path, &encoded)?;
        Ok(out)
    }
}

impl ResultsRepo for FsResultsRepo {
    fn record_invocation(&self, chain: &ChainId, seq: u32) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_invocation(rec, seq))
    }

    fn put_partial(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
    ) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_partial(rec, seq, payload))
    }

    fn finalize(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
        finished_at: u64,
        fencing: bool,
    ) -> Result<FinalizeOutcome, StoreError> {
        self.update(chain, |rec| {
            apply_finalize(rec, seq, payload, finished_at, fencing)
        })
    }

    fn mark_failed(&self, chain: &ChainId, reason: &str) -> Result<(), StoreError> {
        self.update(chain, |rec| apply_failure(rec, reason))
    }

    fn get_chain(&self, chain: &ChainId) -> Result<Option<ChainRecord>, StoreError> {
        match fs::read(self.record_path(chain)) {
            Ok(raw) => Ok(Some(serde_json::from_slice(&raw).map_err(|e| {
                StoreError::Corrupt(format!("chain record {chain}: {e}"))
            })?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

// ---------------------------------------------------------------------------
// latency-injecting stub backend
// ---------------------------------------------------------------------------

/// Transfer cost model for the remote-storage stand-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LatencyModel {
    pub put_ms_per_mib: u64,
    pub get_ms_per_mib: u64,
    pub fixed_ms: u64,
}

impl LatencyModel {
    pub const ZERO: LatencyModel = LatencyModel {
        put_ms_per_mib: 0,
        get_ms_per_mib: 0,
        fixed_ms: 0,
    };

    fn charge(&self, bytes: u64, rate_per_mib: u64) -> u64 {
        self.fixed_ms + bytes * rate_per_mib / (1024 * 1024)
    }
}

/// Wraps a checkpoint repo and charges transfer latency to the clock: a fixed
/// per-operation cost plus a per-MiB rate over the manifest's blob bytes.
pub struct StubRemoteCheckpointRepo {
    inner: Box<dyn CheckpointRepo>,
    latency: LatencyModel,
    clock: Arc<dyn Clock>,
}

impl StubRemoteCheckpointRepo {
    pub fn new(inner: Box<dyn CheckpointRepo>, latency: LatencyModel, clock: Arc<dyn Clock>) -> Self {
        StubRemoteCheckpointRepo {
            inner,
            latency,
            clock,
        }
    }
}

impl CheckpointRepo for StubRemoteCheckpointRepo {
    fn put(&self, manifest: &CheckpointManifest, blob_dir: &Path) -> Result<String, StoreError> {
        self.clock
            .sleep(self.latency.charge(manifest.total_bytes(), self.latency.put_ms_per_mib));
        self.inner.put(manifest, blob_dir)
    }

    fn get_latest(&self, chain: &ChainId) -> Result<Option<CheckpointHit>, StoreError> {
        let hit = self.inner.get_latest(chain)?;
        let bytes = hit.as_ref().map_or(0, |h| h.manifest.total_bytes());
        self.clock
            .sleep(self.latency.charge(bytes, self.latency.get_ms_per_mib));
        Ok(hit)
    }
}

/// Same idea for the results repository; payload-carrying writes pay the
/// per-MiB rate over the encoded payload.
pub struct StubRemoteResultsRepo {
    inner: Box<dyn ResultsRepo>,
    latency: LatencyModel,
    clock: Arc<dyn Clock>,
}

impl StubRemoteResultsRepo {
    pub fn new(inner: Box<dyn ResultsRepo>, latency: LatencyModel, clock: Arc<dyn Clock>) -> Self {
        StubRemoteResultsRepo {
            inner,
            latency,
            clock,
        }
    }

    fn payload_bytes(payload: &serde_json::Value) -> u64 {
        payload.to_string().len() as u64
    }
}

impl ResultsRepo for StubRemoteResultsRepo {
    fn record_invocation(&self, chain: &ChainId, seq: u32) -> Result<(), StoreError> {
        self.clock.sleep(self.latency.fixed_ms);
        self.inner.record_invocation(chain, seq)
    }

    fn put_partial(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
    ) -> Result<(), StoreError> {
        self.clock.sleep(
            self.latency
                .charge(Self::payload_bytes(payload), self.latency.put_ms_per_mib),
        );
        self.inner.put_partial(chain, seq, payload)
    }

    fn finalize(
        &self,
        chain: &ChainId,
        seq: u32,
        payload: &serde_json::Value,
        finished_at: u64,
        fencing: bool,
    ) -> Result<FinalizeOutcome, StoreError> {
        self.clock.sleep(
            self.latency
                .charge(Self::payload_bytes(payload), self.latency.put_ms_per_mib),
        );
        self.inner.finalize(chain, seq, payload, finished_at, fencing)
    }

    fn mark_failed(&self, chain: &ChainId, reason: &str) -> Result<(), StoreError> {
        self.clock.sleep(self.latency.fixed_ms);
        self.inner.mark_failed(chain, reason)
    }

    fn get_chain(&self, chain: &ChainId) -> Result<Option<ChainRecord>, StoreError> {
        self.clock.sleep(self.latency.fixed_ms);
        self.inner.get_chain(chain)
    }
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Memory,
    LocalFs,
    StubRemote,
}

/// Backend selection for one repository pair.
#[derive(Debug, Clone)]
pub struct RepoConfig {
    pub backend: BackendKind,
    /// Root directory; required for `local_fs`, optional durable backing for
    /// `stub_remote` (defaults to memory).
    pub root: Option<PathBuf>,
    pub latency_model: LatencyModel,
}

impl RepoConfig {
    pub fn memory() -> Self {
        RepoConfig {
            backend: BackendKind::Memory,
            root: None,
            latency_model: LatencyModel::ZERO,
        }
    }

    pub fn local_fs(root: impl Into<PathBuf>) -> Self {
        RepoConfig {
            backend: BackendKind::LocalFs,
            root: Some(root.into()),
            latency_model: LatencyModel::ZERO,
        }
    }

    pub fn stub_remote(latency_model: LatencyModel) -> Self {
        RepoConfig {
            backend: BackendKind::StubRemote,
            root: None,
            latency_model,
        }
    }
}

/// The repository pair an environment runs against.
pub type RepoPair = (Arc<dyn CheckpointRepo>, Arc<dyn ResultsRepo>);

type BoxedRepoPair = (Box<dyn CheckpointRepo>, Box<dyn ResultsRepo>);

/// Opens the checkpoint and results repositories described by `cfg`.
pub fn open_repos(cfg: &RepoConfig, clock: Arc<dyn Clock>) -> Result<RepoPair, StoreError> {
    fn plain(cfg: &RepoConfig) -> Result<BoxedRepoPair, StoreError> {
        match &cfg.root {
            Some(root) => Ok((
                Box::new(FsCheckpointRepo::open(root)?),
                Box::new(FsResultsRepo::open(root)?),
            )),
            None => Ok((
                Box::new(MemoryCheckpointRepo::new()),
                Box::new(MemoryResultsRepo::new()),
            )),
        }
    }

    match cfg.backend {
        BackendKind::Memory => {
            if cfg.root.is_some() {
                return Err(StoreError::Backend(
                    "memory backend takes no root directory".into(),
                ));
            }
            Ok((
                Arc::new(MemoryCheckpointRepo::new()),
                Arc::new(MemoryResultsRepo::new()),
            ))
        }
        BackendKind::LocalFs => {
            let root = cfg.root.as_ref().ok_or_else(|| {
                StoreError::Backend("local_fs backend requires a root directory".into())
            })?;
            Ok((
                Arc::new(FsCheckpointRepo::open(root)?),
                Arc::new(FsResultsRepo::open(root)?),
            ))
        }
        BackendKind::StubRemote => {
            let (ckpt, results) = plain(cfg)?;
            Ok((
                Arc::new(StubRemoteCheckpointRepo::new(
                    ckpt,
                    cfg.latency_model,
                    clock.clone(),
                )),
                Arc::new(StubRemoteResultsRepo::new(
                    results,
                    cfg.latency_model,
                    clock,
                )),
            ))
        }
    }
}
