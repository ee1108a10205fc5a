//! Checkpoint and restore of managed workloads.
//!
//! Two interchangeable backends sit behind the same manifest format:
//!
//! - [`CooperativeCheckpointer`] pauses a workload at a step boundary and
//!   serializes its [`CooperativeState`] to a single JSON file. Deterministic,
//!   fast, and the primary path for tests and simulation.
//! - [`ExternalAdapter`] drives a DMTCP-style checkpoint/restore tool through
//!   configurable command templates: launch wraps the workload executable,
//!   checkpoint dumps image files plus a restart script, restore executes the
//!   restart script. The image files are opaque; only the manifest enumerates
//!   them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::Arc;
use std::time::Duration;

use crate::clock::Clock;
use crate::model::{sha256_hex, ChainId, CheckpointManifest, FileEntry, RestartDescriptor, WorkloadSpec};
use crate::workloads::{CooperativeState, Workload, WorkloadError, WorkloadRegistry};

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("already-completed: workload finished before the checkpoint was taken")]
    AlreadyCompleted,
    #[error("dead handle: workload was already terminated")]
    DeadHandle,
    #[error("tool unavailable: {0}")]
    ToolUnavailable(String),
    #[error("checkpoint tool failed (status {status}): {detail}")]
    ToolFailed { status: i32, detail: String },
    #[error("restart descriptor does not match this backend")]
    WrongDescriptor,
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad checkpoint data: {0}")]
    BadData(String),
}

/// Relative filename of the cooperative state blob inside a checkpoint.
pub const STATE_FILE_NAME: &str = "state.json";

/// Builds a manifest enumerating every regular file under `dir` (relative
/// paths, sorted) with sizes and digests.
pub fn manifest_for_dir(
    chain_id: &ChainId,
    seq: u32,
    created_at: u64,
    dir: &Path,
    restart: RestartDescriptor,
) -> std::io::Result<CheckpointManifest> {
    fn walk(base: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let entry = entry?;
            let path = entry.path();
            if path.is_dir() {
                walk(base, &path, out)?;
            } else {
                out.push(path.strip_prefix(base).unwrap().to_path_buf());
            }
        }
        Ok(())
    }

    let mut paths = Vec::new();
    walk(dir, dir, &mut paths)?;
    paths.sort();

    let mut files = Vec::with_capacity(paths.len());
    for rel in paths {
        let bytes = fs::read(dir.join(&rel))?;
        files.push(FileEntry {
            relative_path: rel.to_string_lossy().into_owned(),
            size_bytes: bytes.len() as u64,
            sha256_hex: sha256_hex(&bytes),
        });
    }
    Ok(CheckpointManifest {
        chain_id: chain_id.clone(),
        seq,
        created_at,
        files,
        restart,
    })
}

// ---------------------------------------------------------------------------
// cooperative backend
// ---------------------------------------------------------------------------

/// Checkpoints cooperative workloads by serializing their declared state at a
/// step boundary. `cost_ms` models dump time on a simulated clock.
pub struct CooperativeCheckpointer {
    registry: Arc<WorkloadRegistry>,
    cost_ms: u64,
}

impl CooperativeCheckpointer {
    pub fn new(registry: Arc<WorkloadRegistry>) -> Self {
        CooperativeCheckpointer {
            registry,
            cost_ms: 0,
        }
    }

    pub fn with_cost_ms(mut self, cost_ms: u64) -> Self {
        self.cost_ms = cost_ms;
        self
    }

    pub fn registry(&self) -> &Arc<WorkloadRegistry> {
        &self.registry
    }

    pub fn launch(&self, spec: &WorkloadSpec) -> Result<Box<dyn Workload>, WorkloadError> {
        self.registry.instantiate(spec, None)
    }

    /// Serializes the workload's state into `out_dir/state.json` and returns
    /// the manifest describing it. Errors with `AlreadyCompleted` when the
    /// workload finished before the pause landed — the race a caller must be
    /// prepared to handle.
    pub fn checkpoint(
        &self,
        chain_id: &ChainId,
        seq: u32,
        workload: &dyn Workload,
        out_dir: &Path,
        clock: &dyn Clock,
    ) -> Result<CheckpointManifest, CheckpointError> {
        if workload.is_complete() {
            return Err(CheckpointError::AlreadyCompleted);
        }
        fs::create_dir_all(out_dir)?;
        let state = workload.snapshot();
        let bytes = serde_json::to_vec_pretty(&state)
            .map_err(|e| CheckpointError::BadData(format!("encode state: {e}")))?;
        fs::write(out_dir.join(STATE_FILE_NAME), &bytes)?;
        clock.advance(self.cost_ms);
        Ok(CheckpointManifest {
            chain_id: chain_id.clone(),
            seq,
            created_at: clock.now_ms(),
            files: vec![FileEntry {
                relative_path: STATE_FILE_NAME.into(),
                size_bytes: bytes.len() as u64,
                sha256_hex: sha256_hex(&bytes),
            }],
            restart: RestartDescriptor::Cooperative {
                state_key: STATE_FILE_NAME.into(),
            },
        })
    }

    /// Rebuilds the workload from the state file a verified manifest points
    /// at, resumed exactly at the checkpointed boundary.
    pub fn restore(
        &self,
        spec: &WorkloadSpec,
        manifest: &CheckpointManifest,
        work_dir: &Path,
    ) -> Result<Box<dyn Workload>, CheckpointError> {
        let RestartDescriptor::Cooperative { state_key } = &manifest.restart else {
            return Err(CheckpointError::WrongDescriptor);
        };
        let raw = fs::read(work_dir.join(state_key))?;
        let state: CooperativeState = serde_json::from_slice(&raw)
            .map_err(|e| CheckpointError::BadData(format!("decode state: {e}")))?;
        Ok(self.registry.instantiate(spec, Some(&state))?)
    }
}

// ---------------------------------------------------------------------------
// external-tool adapter
// ---------------------------------------------------------------------------

/// Command templates for a DMTCP-style CLI. Placeholders: `{exe}` the
/// workload executable, `{bin}` the workload name, `{args}` its arguments
/// (expands to multiple argv entries), `{ckpt_dir}` the image directory,
/// `{pid}` the wrapped process id.
#[derive(Debug, Clone)]
pub struct ExternalToolConfig {
    pub launch_cmd: String,
    pub checkpoint_cmd: String,
    /// Filename of the tool-generated restart script inside the image dir.
    pub restart_script: String,
    /// Environment exported to every tool invocation (coordinator host etc).
    pub env: Vec<(String, String)>,
    /// How long to wait for image files after the checkpoint command returns.
    pub checkpoint_wait_ms: u64,
    pub poll_interval_ms: u64,
}

impl ExternalToolConfig {
    /// Template for DMTCP's own CLI verbs.
    pub fn dmtcp() -> Self {
        ExternalToolConfig {
            launch_cmd: "dmtcp_launch --new-coordinator --ckptdir {ckpt_dir} {exe} {bin} {args}"
                .into(),
            checkpoint_cmd: "dmtcp_command --checkpoint".into(),
            restart_script: "dmtcp_restart_script.sh".into(),
            env: Vec::new(),
            checkpoint_wait_ms: 30_000,
            poll_interval_ms: 20,
        }
    }
}

fn split_template(template: &str, subst: &[(&str, Vec<String>)]) -> Vec<String> {
    let mut argv = Vec::new();
    for token in template.split_whitespace() {
        if let Some((_, values)) = subst.iter().find(|(k, _)| *k == token) {
            argv.extend(values.iter().cloned());
        } else {
            let mut tok = token.to_string();
            for (k, values) in subst {
                if let [single] = values.as_slice() {
                    tok = tok.replace(k, single);
                }
            }
            argv.push(tok);
        }
    }
    argv
}

/// A workload process running under the external tool.
#[derive(Debug)]
pub struct ExternalRun {
    child: Option<Child>,
    pub work_dir: PathBuf,
    pub stdout_path: PathBuf,
    pub stderr_path: PathBuf,
    exit_status: Option<std::process::ExitStatus>,
}

impl ExternalRun {
    fn spawn(argv: &[String], work_dir: &Path, env: &[(String, String)]) -> Result<Self, CheckpointError> {
        fs::create_dir_all(work_dir)?;
        let stdout_path = work_dir.join("workload.out");
        let stderr_path = work_dir.join("workload.err");
        let stdout = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&stdout_path)?;
        let stderr = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&stderr_path)?;
        let (head, rest) = argv.split_first().ok_or_else(|| {
            CheckpointError::BadData("empty command template".into())
        })?;
        let mut cmd = Command::new(head);
        cmd.args(rest)
            .stdin(Stdio::null())
            .stdout(Stdio::from(stdout))
            .stderr(Stdio::from(stderr))
            .current_dir(work_dir);
        for (k, v) in env {
            cmd.env(k, v);
        }
        let child = cmd.spawn().map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CheckpointError::ToolUnavailable(head.clone())
            } else {
                CheckpointError::Io(e)
            }
        })?;
        Ok(ExternalRun {
            child: Some(child),
            work_dir: work_dir.to_path_buf(),
            stdout_path,
            stderr_path,
            exit_status: None,
        })
    }

    pub fn pid(&self) -> Option<u32> {
        self.child.as_ref().map(|c| c.id())
    }

    /// Non-blocking: exit status if the process has finished.
    pub fn poll(&mut self) -> std::io::Result<Option<std::process::ExitStatus>> {
        if let Some(status) = self.exit_status {
            return Ok(Some(status));
        }
        let Some(child) = self.child.as_mut() else {
            return Ok(self.exit_status);
        };
        if let Some(status) = child.try_wait()? {
            self.exit_status = Some(status);
        }
        Ok(self.exit_status)
    }

    pub fn is_dead(&self) -> bool {
        self.child.is_none() && self.exit_status.is_none()
    }

    /// Terminates the process if still running.
    pub fn kill(&mut self) {
        if let Some(mut child) = self.child.take() {
            if self.exit_status.is_none() {
                let _ = child.kill();
                let _ = child.wait();
            }
        }
    }

    /// The final result a standalone workload printed as its last stdout
    /// line.
    pub fn result_from_stdout(&self) -> Result<serde_json::Value, CheckpointError> {
        let raw = fs::read_to_string(&self.stdout_path)?;
        let line = raw
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| CheckpointError::BadData("workload produced no output".into()))?;
        serde_json::from_str(line)
            .map_err(|e| CheckpointError::BadData(format!("workload output not JSON: {e}")))
    }

    /// Last few lines of captured output, for forwarding into runner logs.
    pub fn output_tail(&self, max_lines: usize) -> String {
        let mut tail = String::new();
        for path in [&self.stdout_path, &self.stderr_path] {
            if let Ok(raw) = fs::read_to_string(path) {
                let lines: Vec<&str> = raw.lines().collect();
                let start = lines.len().saturating_sub(max_lines);
                for line in &lines[start..] {
                    tail.push_str(line);
                    tail.push('\n');
                }
            }
        }
        tail
    }
}

impl Drop for ExternalRun {
    fn drop(&mut self) {
        self.kill();
    }
}

/// Drives an external checkpoint/restore tool through its CLI.
pub struct ExternalAdapter {
    config: ExternalToolConfig,
    /// Path of the standalone workload executable the tool wraps.
    workload_exe: PathBuf,
}

impl ExternalAdapter {
    pub fn new(config: ExternalToolConfig, workload_exe: impl Into<PathBuf>) -> Self {
        ExternalAdapter {
            config,
            workload_exe: workload_exe.into(),
        }
    }

    fn subst<'a>(
        &self,
        spec: Option<&WorkloadSpec>,
        ckpt_dir: &Path,
        pid: Option<u32>,
    ) -> Vec<(&'a str, Vec<String>)> {
        let mut subst = vec![
            ("{ckpt_dir}", vec![ckpt_dir.to_string_lossy().into_owned()]),
            (
                "{exe}",
                vec![self.workload_exe.to_string_lossy().into_owned()],
            ),
        ];
        if let Some(spec) = spec {
            subst.push(("{bin}", vec![spec.bin.clone()]));
            subst.push(("{args}", spec.bin_args.clone()));
        }
        if let Some(pid) = pid {
            subst.push(("{pid}", vec![pid.to_string()]));
        }
        subst
    }

    /// Starts the workload under the tool wrapper. Stdout/stderr are captured
    /// to files in `work_dir`.
    pub fn launch(
        &self,
        spec: &WorkloadSpec,
        work_dir: &Path,
        ckpt_dir: &Path,
    ) -> Result<ExternalRun, CheckpointError> {
        fs::create_dir_all(ckpt_dir)?;
        let argv = split_template(&self.config.launch_cmd, &self.subst(Some(spec), ckpt_dir, None));
        let mut env = self.config.env.clone();
        env.extend(spec.env.iter().map(|(k, v)| (k.clone(), v.clone())));
        ExternalRun::spawn(&argv, work_dir, &env)
    }

    /// Issues the tool's checkpoint command and blocks until the image files
    /// and restart script exist, then returns a manifest enumerating them.
    pub fn checkpoint(
        &self,
        chain_id: &ChainId,
        seq: u32,
        run: &mut ExternalRun,
        ckpt_dir: &Path,
        clock: &dyn Clock,
    ) -> Result<CheckpointManifest, CheckpointError> {
        if let Some(status) = run.poll()? {
            return Err(if status.success() {
                CheckpointError::AlreadyCompleted
            } else {
                CheckpointError::DeadHandle
            });
        }
        if run.is_dead() {
            return Err(CheckpointError::DeadHandle);
        }
        let pid = run.pid();
        let argv = split_template(&self.config.checkpoint_cmd, &self.subst(None, ckpt_dir, pid));
        let (head, rest) = argv
            .split_first()
            .ok_or_else(|| CheckpointError::BadData("empty checkpoint template".into()))?;

        // a freshly launched process may not be checkpointable yet; retry
        // the tool command while the workload is alive and the budget lasts
        let mut waited = 0u64;
        loop {
            let mut cmd = Command::new(head);
            cmd.args(rest).current_dir(&run.work_dir);
            for (k, v) in &self.config.env {
                cmd.env(k, v);
            }
            let output = cmd.output().map_err(|e| {
                if e.kind() == std::io::ErrorKind::NotFound {
                    CheckpointError::ToolUnavailable(head.clone())
                } else {
                    CheckpointError::Io(e)
                }
            })?;
            if output.status.success() {
                break;
            }
            let failure = CheckpointError::ToolFailed {
                status: output.status.code().unwrap_or(-1),
                detail: String::from_utf8_lossy(&output.stderr).into_owned(),
            };
            if waited >= self.config.checkpoint_wait_ms {
                return Err(failure);
            }
            if run.poll()?.is_some() {
                return Err(CheckpointError::AlreadyCompleted);
            }
            std::thread::sleep(Duration::from_millis(self.config.poll_interval_ms));
            waited += self.config.poll_interval_ms;
        }

        // the tool writes images asynchronously; wait for the restart script
        let script = ckpt_dir.join(&self.config.restart_script);
        let mut waited = 0u64;
        while !script.exists() {
            if waited >= self.config.checkpoint_wait_ms {
                return Err(CheckpointError::ToolFailed {
                    status: 0,
                    detail: format!(
                        "restart script {} did not appear within {} ms",
                        script.display(),
                        self.config.checkpoint_wait_ms
                    ),
                });
            }
            std::thread::sleep(Duration::from_millis(self.config.poll_interval_ms));
            waited += self.config.poll_interval_ms;
        }

        let image_files: Vec<String> = {
            let mut names = Vec::new();
            for entry in fs::read_dir(ckpt_dir)? {
                let entry = entry?;
                if entry.path().is_file() {
                    names.push(entry.file_name().to_string_lossy().into_owned());
                }
            }
            names.sort();
            names
                .into_iter()
                .filter(|n| *n != self.config.restart_script)
                .collect()
        };
        manifest_for_dir(
            chain_id,
            seq,
            clock.now_ms(),
            ckpt_dir,
            RestartDescriptor::ExternalProcess {
                restart_script: self.config.restart_script.clone(),
                image_files,
            },
        )
        .map_err(CheckpointError::Io)
    }

    /// Resumes from downloaded image files by executing the restart script.
    pub fn restore(
        &self,
        manifest: &CheckpointManifest,
        work_dir: &Path,
    ) -> Result<ExternalRun, CheckpointError> {
        let RestartDescriptor::ExternalProcess { restart_script, .. } = &manifest.restart else {
            return Err(CheckpointError::WrongDescriptor);
        };
        let script = work_dir.join(restart_script);
        if !script.exists() {
            return Err(CheckpointError::BadData(format!(
                "restart script {} missing from downloaded image",
                script.display()
            )));
        }
        let argv = vec![
            "sh".to_string(),
            script.to_string_lossy().into_owned(),
        ];
        ExternalRun::spawn(&argv, work_dir, &self.config.env)
    }
}

// ---------------------------------------------------------------------------
// backend dispatch
// ---------------------------------------------------------------------------

/// A launched workload under one of the two checkpoint backends.
pub enum ManagedWorkload {
    Cooperative { workload: Option<Box<dyn Workload>> },
    External { run: ExternalRun },
}

impl ManagedWorkload {
    pub fn cooperative(workload: Box<dyn Workload>) -> Self {
        ManagedWorkload::Cooperative {
            workload: Some(workload),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::SimClock;
    use crate::model::verify_manifest;
    use crate::workloads::RecordingEffects;

    fn spec(bin: &str, args: &[&str]) -> WorkloadSpec {
        WorkloadSpec::new(bin, args.iter().map(|s| s.to_string()).collect())
    }

    fn chain() -> ChainId {
        ChainId::new("c1").unwrap()
    }

    #[test]
    fn checkpoint_writes_readable_state() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let clock = SimClock::new();
        let mut w = ck.launch(&spec("counter", &["70", "1"])).unwrap();
        let mut fx = RecordingEffects::default();
        for _ in 0..50 {
            w.step(&mut fx).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let manifest = ck
            .checkpoint(&chain(), 1, w.as_ref(), dir.path(), &clock)
            .unwrap();
        assert_eq!(manifest.files.len(), 1);

        // read-back oracle: the state file holds exactly the snapshot payload
        let raw = fs::read(dir.path().join(STATE_FILE_NAME)).unwrap();
        let state: CooperativeState = serde_json::from_slice(&raw).unwrap();
        assert_eq!(state.payload["count"].as_u64(), Some(50));
        assert_eq!(state, w.snapshot());

        // manifests are self-validating
        struct Dir(PathBuf);
        impl crate::model::BlobFetch for Dir {
            fn fetch(&self, rel: &str) -> std::io::Result<Option<Vec<u8>>> {
                match fs::read(self.0.join(rel)) {
                    Ok(b) => Ok(Some(b)),
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                    Err(e) => Err(e),
                }
            }
        }
        assert!(verify_manifest(&manifest, &Dir(dir.path().to_path_buf())).pass);
    }

    #[test]
    fn checkpoint_of_completed_workload_is_typed_error() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let clock = SimClock::new();
        let mut w = ck.launch(&spec("counter", &["2", "1"])).unwrap();
        let mut fx = RecordingEffects::default();
        while !w.is_complete() {
            w.step(&mut fx).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            ck.checkpoint(&chain(), 1, w.as_ref(), dir.path(), &clock),
            Err(CheckpointError::AlreadyCompleted)
        ));
    }

    #[test]
    fn identical_state_checkpoints_identically() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let clock = SimClock::new();
        let mut w = ck.launch(&spec("counter", &["9", "1"])).unwrap();
        let mut fx = RecordingEffects::default();
        for _ in 0..4 {
            w.step(&mut fx).unwrap();
        }
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let m1 = ck.checkpoint(&chain(), 1, w.as_ref(), d1.path(), &clock).unwrap();
        let m2 = ck.checkpoint(&chain(), 1, w.as_ref(), d2.path(), &clock).unwrap();
        assert_eq!(m1.files[0].sha256_hex, m2.files[0].sha256_hex);
    }

    #[test]
    fn restore_resumes_at_the_boundary_and_fixpoints() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let clock = SimClock::new();
        let s = spec("counter", &["70", "1"]);
        let mut w = ck.launch(&s).unwrap();
        let mut fx = RecordingEffects::default();
        for _ in 0..50 {
            w.step(&mut fx).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let manifest = ck.checkpoint(&chain(), 1, w.as_ref(), dir.path(), &clock).unwrap();
        drop(w);

        let mut restored = ck.restore(&s, &manifest, dir.path()).unwrap();

        // checkpoint ∘ restore ∘ checkpoint with no work between: same payload
        let dir2 = tempfile::tempdir().unwrap();
        let manifest2 = ck
            .checkpoint(&chain(), 2, restored.as_ref(), dir2.path(), &clock)
            .unwrap();
        assert_eq!(manifest.files[0].sha256_hex, manifest2.files[0].sha256_hex);

        let mut fx2 = RecordingEffects::default();
        let result = crate::workloads::run_to_completion(restored.as_mut(), &mut fx2).unwrap();
        assert_eq!(result, serde_json::json!({"count": 70}));
        let posted: Vec<u64> = fx2.partials.iter().map(|p| p["count"].as_u64().unwrap()).collect();
        assert_eq!(posted, vec![60, 70]);
    }

    #[test]
    fn restore_rejects_corrupt_state_file() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let clock = SimClock::new();
        let s = spec("counter", &["9", "1"]);
        let w = ck.launch(&s).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = ck.checkpoint(&chain(), 1, w.as_ref(), dir.path(), &clock).unwrap();
        fs::write(dir.path().join(STATE_FILE_NAME), b"{ not json").unwrap();
        assert!(matches!(
            ck.restore(&s, &manifest, dir.path()),
            Err(CheckpointError::BadData(_))
        ));
    }

    #[test]
    fn restore_rejects_version_mismatch() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard());
        let s = spec("counter", &["9", "1"]);
        let dir = tempfile::tempdir().unwrap();
        let state = CooperativeState {
            workload_name: "counter".into(),
            version: 99,
            payload: serde_json::json!({"limit": 9, "count": 1, "last_posted": 0}),
        };
        fs::write(
            dir.path().join(STATE_FILE_NAME),
            serde_json::to_vec(&state).unwrap(),
        )
        .unwrap();
        let manifest = CheckpointManifest {
            chain_id: chain(),
            seq: 1,
            created_at: 0,
            files: vec![],
            restart: RestartDescriptor::Cooperative {
                state_key: STATE_FILE_NAME.into(),
            },
        };
        assert!(matches!(
            ck.restore(&s, &manifest, dir.path()),
            Err(CheckpointError::Workload(WorkloadError::IncompatibleState(_)))
        ));
    }

    #[test]
    fn simulated_dump_cost_advances_the_clock() {
        let ck = CooperativeCheckpointer::new(WorkloadRegistry::standard()).with_cost_ms(25);
        let clock = SimClock::new();
        let w = ck.launch(&spec("counter", &["9", "1"])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        ck.checkpoint(&chain(), 1, w.as_ref(), dir.path(), &clock).unwrap();
        assert_eq!(clock.now_ms(), 25);
    }

    #[test]
    fn external_launch_reports_missing_tool() {
        let adapter = ExternalAdapter::new(
            ExternalToolConfig {
                launch_cmd: "definitely-not-a-real-cr-tool-xyz {exe} {bin} {args}".into(),
                checkpoint_cmd: "definitely-not-a-real-cr-tool-xyz ckpt".into(),
                restart_script: "restart.sh".into(),
                env: Vec::new(),
                checkpoint_wait_ms: 100,
                poll_interval_ms: 10,
            },
            "/bin/true",
        );
        let dir = tempfile::tempdir().unwrap();
        let err = adapter
            .launch(&spec("counter", &["3"]), dir.path(), &dir.path().join("ckpt"))
            .unwrap_err();
        assert!(matches!(err, CheckpointError::ToolUnavailable(_)));
    }

    #[test]
    fn template_substitution_expands_args_inline() {
        let argv = split_template(
            "tool launch --dir {ckpt_dir} -- {exe} {bin} {args}",
            &[
                ("{ckpt_dir}", vec!["/tmp/ck".into()]),
                ("{exe}", vec!["/bin/wl".into()]),
                ("{bin}", vec!["counter".into()]),
                ("{args}", vec!["70".into(), "10".into()]),
            ],
        );
        assert_eq!(
            argv,
            vec!["tool", "launch", "--dir", "/tmp/ck", "--", "/bin/wl", "counter", "70", "10"]
        );
    }
}
