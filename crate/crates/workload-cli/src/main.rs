//! Standalone workload executable for external-process checkpointing.
//!
//! Usage: `lf-workload <bin> [args...]`
//!
//! Runs one of the registered workloads to completion and prints its result
//! JSON as the final stdout line. Environment:
//!
//! - `LF_STATE_FILE` — when set, cooperative state is loaded from this file
//!   at startup (if it exists) and rewritten atomically at every step
//!   boundary, so an external tool can snapshot a consistent state at any
//!   moment and a restart resumes where the dump landed.
//! - `LF_PARTIALS_URL` — when set, partial results are POSTed there as JSON.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use ckptchain_core::model::WorkloadSpec;
use ckptchain_core::workloads::{CooperativeState, StepEffects, WorkloadError, WorkloadRegistry};

struct StandaloneEffects {
    partials_url: Option<String>,
    // built on first use: client construction is slow and most runs post
    // nothing
    client: std::sync::OnceLock<reqwest::blocking::Client>,
}

impl StepEffects for StandaloneEffects {
    fn charge_work(&mut self, _ms: u64) {
        // real computation already consumed real time
    }

    fn charge_wait(&mut self, ms: u64) {
        std::thread::sleep(std::time::Duration::from_millis(ms));
    }

    fn post_partial(&mut self, payload: serde_json::Value) -> Result<(), WorkloadError> {
        let Some(url) = &self.partials_url else {
            return Ok(());
        };
        let client = self.client.get_or_init(reqwest::blocking::Client::new);
        match client.post(url).json(&payload).send() {
            Ok(resp) if resp.status().is_success() => Ok(()),
            Ok(resp) => {
                eprintln!("lf-workload: partial post got {}", resp.status());
                Ok(())
            }
            Err(e) => {
                eprintln!("lf-workload: partial post failed: {e}");
                Ok(())
            }
        }
    }
}

fn save_state(path: &PathBuf, state: &CooperativeState) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec_pretty(state)?)
        .with_context(|| format!("write {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("commit {}", path.display()))?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(bin) = args.next() else {
        bail!("usage: lf-workload <bin> [args...]");
    };
    let spec = WorkloadSpec::new(bin, args.collect());

    let state_file = std::env::var_os("LF_STATE_FILE").map(PathBuf::from);
    let resume: Option<CooperativeState> = match &state_file {
        Some(path) if path.exists() => {
            let raw = std::fs::read(path).with_context(|| format!("read {}", path.display()))?;
            Some(serde_json::from_slice(&raw).context("parse state file")?)
        }
        _ => None,
    };

    let registry = WorkloadRegistry::standard();
    let mut workload = registry
        .instantiate(&spec, resume.as_ref())
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut fx = StandaloneEffects {
        partials_url: std::env::var("LF_PARTIALS_URL").ok(),
        client: std::sync::OnceLock::new(),
    };

    if let Some(path) = &state_file {
        save_state(path, &workload.snapshot())?;
    }
    while !workload.is_complete() {
        workload
            .step(&mut fx)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        if let Some(path) = &state_file {
            save_state(path, &workload.snapshot())?;
        }
    }

    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{}", workload.result())?;
    stdout.flush()?;
    Ok(())
}
