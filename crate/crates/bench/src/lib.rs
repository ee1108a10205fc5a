//! Benchmark harness: repeated chained runs across argument sweeps,
//! capturing execution time, invocation counts, and checkpoint costs, with
//! CSV output and summary statistics.
//!
//! Simulated-clock plans are bit-reproducible: the same plan yields the same
//! samples and therefore byte-identical CSV files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use ckptchain_core::clock::ClockMode;
use ckptchain_core::gateway::{ActionConfig, Gateway};
use ckptchain_core::model::ChainStatus;
use ckptchain_core::runner::RunnerConfig;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("gateway: {0}")]
    Gateway(String),
}

/// One benchmark campaign: a workload, an argument sweep, and the platform
/// settings the chains run under.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchPlan {
    pub workload: String,
    pub args_sweep: Vec<Vec<String>>,
    pub repetitions: u32,
    pub timeout_ms: u64,
    pub trigger_ms: u64,
    pub clock_mode: ClockMode,
    pub fencing: bool,
    /// Race-test configuration forwarded to the runner (0 = off).
    #[serde(default)]
    pub race_window_ms: u64,
    /// Run independent chains concurrently (real clock only).
    #[serde(default)]
    pub parallelism: Option<usize>,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            workload: "counter".into(),
            args_sweep: vec![vec!["70".into()]],
            repetitions: 20,
            timeout_ms: 90_000,
            trigger_ms: 50_000,
            clock_mode: ClockMode::Simulated,
            fencing: true,
            race_window_ms: 0,
            parallelism: None,
        }
    }
}

impl BenchPlan {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions < 1 {
            return Err(BenchError::InvalidPlan("repetitions must be >= 1".into()));
        }
        if self.trigger_ms == 0 || self.trigger_ms >= self.timeout_ms {
            return Err(BenchError::InvalidPlan(format!(
                "trigger {} must satisfy 0 < trigger < timeout {}",
                self.trigger_ms, self.timeout_ms
            )));
        }
        if self.args_sweep.is_empty() {
            return Err(BenchError::InvalidPlan("args_sweep must be non-empty".into()));
        }
        if self.parallelism.is_some() && self.clock_mode == ClockMode::Simulated {
            return Err(BenchError::InvalidPlan(
                "parallel plans require a real clock".into(),
            ));
        }
        Ok(())
    }
}

/// One chain execution, flattened for CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchSample {
    pub workload: String,
    /// JSON-encoded argument list (a single CSV field).
    pub args: String,
    pub run_index: u32,
    /// Chain wall time on the active clock.
    pub execution_ms: u64,
    pub invocation_count: u32,
    pub checkpoint_ms_total: u64,
    pub upload_ms_total: u64,
    /// Count of final results recorded when more than one exists; nonzero
    /// only in the race configuration with fencing off.
    pub duplicate_finals: u32,
    pub failed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArgSummary {
    pub args: String,
    pub runs: u32,
    pub failures: u32,
    pub mean_execution_ms: f64,
    pub stddev_execution_ms: f64,
    pub mean_invocations: f64,
    pub stddev_invocations: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub per_arg: Vec<ArgSummary>,
    /// Chain wall time divided by the estimated single-shot time, over all
    /// successful runs.
    pub overhead_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub samples: Vec<BenchSample>,
    pub summary: BenchSummary,
    pub failed_fraction: f64,
}

/// Executes one chain on a fresh gateway and turns it into a sample.
fn run_once(plan: &BenchPlan, args: &[String], run_index: u32) -> BenchSample {
    let args_json = serde_json::to_string(args).expect("args encode");
    let failed_sample = |reason: &str| {
        log::warn!("bench run failed ({} {:?} #{run_index}): {reason}", plan.workload, args);
        BenchSample {
            workload: plan.workload.clone(),
            args: args_json.clone(),
            run_index,
            execution_ms: 0,
            invocation_count: 0,
            checkpoint_ms_total: 0,
            upload_ms_total: 0,
            duplicate_finals: 0,
            failed: true,
        }
    };

    let gateway = Gateway::builder(plan.clock_mode).build();
    let mut action = ActionConfig::new("bench");
    action.timeout_ms = plan.timeout_ms;
    action.runner = RunnerConfig {
        checkpoint_trigger_ms: plan.trigger_ms,
        fencing_enabled: plan.fencing,
        race_window_ms: plan.race_window_ms,
        ..RunnerConfig::default()
    };
    if let Err(e) = gateway.register_action(action) {
        return failed_sample(&e.to_string());
    }

    let params = serde_json::json!({ "bin": plan.workload, "bin_args": args });
    let reply = match gateway.invoke("bench", params, true) {
        Ok(reply) => reply,
        Err(e) => return failed_sample(&e.to_string()),
    };
    let Some(outcome) = reply.outcome else {
        return failed_sample("no outcome for blocking invoke");
    };
    let chain = outcome.chain_id.clone();

    // on a real clock, successors run on background threads
    if plan.clock_mode == ClockMode::Real {
        let budget_ms = plan.timeout_ms.saturating_mul(70).max(10_000);
        let start = std::time::Instant::now();
        loop {
            gateway.join_background();
            match gateway.results().get_chain(&chain) {
                Ok(Some(rec)) if rec.status != ChainStatus::Running => break,
                _ => {}
            }
            if start.elapsed().as_millis() as u64 > budget_ms {
                return failed_sample("chain did not settle within budget");
            }
            std::thread::sleep(std::time::Duration::from_millis(5));
        }
    }

    let rec = match gateway.results().get_chain(&chain) {
        Ok(Some(rec)) => rec,
        _ => return failed_sample("chain record missing"),
    };
    let report = match gateway.chain_report(&chain) {
        Ok(r) => r,
        Err(e) => return failed_sample(&e.to_string()),
    };
    BenchSample {
        workload: plan.workload.clone(),
        args: args_json,
        run_index,
        execution_ms: report.execution_ms,
        invocation_count: report.invocation_count,
        checkpoint_ms_total: report.checkpoint_ms_total,
        upload_ms_total: report.upload_ms_total,
        duplicate_finals: report.duplicate_finals,
        failed: rec.status != ChainStatus::Completed,
    }
}

/// Runs the whole plan: `repetitions` chains per sweep entry, sequential by
/// default. Chain failures mark their sample failed and the plan continues.
pub fn run_plan(plan: &BenchPlan) -> Result<BenchOutcome, BenchError> {
    plan.validate()?;
    let jobs: Vec<(usize, Vec<String>, u32)> = plan
        .args_sweep
        .iter()
        .enumerate()
        .flat_map(|(ai, args)| {
            (0..plan.repetitions).map(move |rep| (ai, args.clone(), rep))
        })
        .collect();

    let mut samples: Vec<Option<BenchSample>> = vec![None; jobs.len()];
    match plan.parallelism {
        Some(width) if width > 1 => {
            let next = std::sync::atomic::AtomicUsize::new(0);
            let slots: Vec<std::sync::Mutex<Option<BenchSample>>> =
                jobs.iter().map(|_| std::sync::Mutex::new(None)).collect();
            std::thread::scope(|scope| {
                for _ in 0..width {
                    scope.spawn(|| loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        let Some((_, args, rep)) = jobs.get(i) else { break };
                        *slots[i].lock().unwrap() = Some(run_once(plan, args, *rep));
                    });
                }
            });
            for (i, slot) in slots.into_iter().enumerate() {
                samples[i] = slot.into_inner().unwrap();
            }
        }
        _ => {
            for (i, (_, args, rep)) in jobs.iter().enumerate() {
                samples[i] = Some(run_once(plan, args, *rep));
            }
        }
    }
    let samples: Vec<BenchSample> = samples.into_iter().map(|s| s.expect("job ran")).collect();

    let summary = summarize(plan, &samples);
    let failures = samples.iter().filter(|s| s.failed).count();
    Ok(BenchOutcome {
        failed_fraction: failures as f64 / samples.len() as f64,
        samples,
        summary,
    })
}

fn summarize(plan: &BenchPlan, samples: &[BenchSample]) -> BenchSummary {
    fn mean_stddev(values: &[f64]) -> (f64, f64) {
        if values.is_empty() {
            return (0.0, 0.0);
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        (mean, var.sqrt())
    }

    let mut per_arg = Vec::new();
    for args in &plan.args_sweep {
        let key = serde_json::to_string(args).expect("args encode");
        let ok: Vec<&BenchSample> = samples
            .iter()
            .filter(|s| s.args == key && !s.failed)
            .collect();
        let failures = samples.iter().filter(|s| s.args == key && s.failed).count() as u32;
        let (mean_exec, sd_exec) =
            mean_stddev(&ok.iter().map(|s| s.execution_ms as f64).collect::<Vec<_>>());
        let (mean_inv, sd_inv) =
            mean_stddev(&ok.iter().map(|s| s.invocation_count as f64).collect::<Vec<_>>());
        per_arg.push(ArgSummary {
            args: key,
            runs: ok.len() as u32 + failures,
            failures,
            mean_execution_ms: mean_exec,
            stddev_execution_ms: sd_exec,
            mean_invocations: mean_inv,
            stddev_invocations: sd_inv,
        });
    }

    // overhead = chain wall time over pure work time; in zero-overhead
    // simulation this is exactly 1
    let mut chain_ms = 0u64;
    let mut work_ms = 0u64;
    for s in samples.iter().filter(|s| !s.failed) {
        chain_ms += s.execution_ms;
        work_ms += s.execution_ms - s.checkpoint_ms_total.min(s.execution_ms);
    }
    let overhead_ratio = if work_ms > 0 {
        chain_ms as f64 / work_ms as f64
    } else {
        1.0
    };
    BenchSummary {
        per_arg,
        overhead_ratio,
    }
}

/// Writes samples as CSV: one header row, one row per sample, RFC 4180
/// quoting, columns exactly the sample fields in declared order.
pub fn emit_csv(samples: &[BenchSample], path: &Path) -> Result<(), BenchError> {
    if samples.is_empty() {
        return Err(BenchError::InvalidPlan("no samples to write".into()));
    }
    let mut writer = csv::Writer::from_path(path)?;
    for sample in samples {
        writer.serialize(sample)?;
    }
    writer.flush()?;
    Ok(())
}

/// Prints the summary the way the CLI reports it.
pub fn print_summary(out: &mut dyn std::io::Write, summary: &BenchSummary) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<28} {:>5} {:>5}  {:>14} {:>12}  {:>12} {:>10}",
        "args", "runs", "fail", "mean exec ms", "sd exec", "mean invocs", "sd invocs"
    )?;
    for row in &summary.per_arg {
        writeln!(
            out,
            "{:<28} {:>5} {:>5}  {:>14.2} {:>12.2}  {:>12.2} {:>10.2}",
            row.args,
            row.runs,
            row.failures,
            row.mean_execution_ms,
            row.stddev_execution_ms,
            row.mean_invocations,
            row.stddev_invocations
        )?;
    }
    writeln!(out, "overhead ratio (chain / single-shot): {:.4}", summary.overhead_ratio)
}
