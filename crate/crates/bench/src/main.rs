//! Benchmark harness CLI.
//!
//! ```text
//! bench run --workload counter --args '[["40","1"],["70","1"]]' --reps 20 \
//!   --timeout-ms 90000 --trigger-ms 50000 --clock simulated --fencing on \
//!   --out samples.csv
//! ```

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ckptchain_bench::{emit_csv, print_summary, run_plan, BenchPlan};
use ckptchain_core::clock::ClockMode;

#[derive(Parser, Debug)]
#[command(name = "bench", about = "Chained-workload benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute a benchmark plan and write samples as CSV.
    Run {
        /// Workload name (counter | factors | matrix).
        #[arg(long)]
        workload: String,

        /// Argument sweep as a JSON list; each entry is one argument list
        /// (scalars are treated as single-argument lists).
        #[arg(long)]
        args: String,

        /// Repetitions per sweep entry.
        #[arg(long, default_value_t = 20)]
        reps: u32,

        /// Action timeout in milliseconds.
        #[arg(long = "timeout-ms", default_value_t = 90_000)]
        timeout_ms: u64,

        /// Checkpoint trigger in milliseconds.
        #[arg(long = "trigger-ms", default_value_t = 50_000)]
        trigger_ms: u64,

        /// Clock mode (simulated | real).
        #[arg(long, default_value = "simulated")]
        clock: String,

        /// Result fencing (on | off).
        #[arg(long, default_value = "on")]
        fencing: String,

        /// Delayed-termination race window in milliseconds (0 = off).
        #[arg(long = "race-window-ms", default_value_t = 0)]
        race_window_ms: u64,

        /// Run independent chains concurrently (real clock only).
        #[arg(long)]
        parallel: Option<usize>,

        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_sweep(raw: &str) -> anyhow::Result<Vec<Vec<String>>> {
    let value: serde_json::Value = serde_json::from_str(raw)?;
    let serde_json::Value::Array(entries) = value else {
        anyhow::bail!("--args must be a JSON list");
    };
    let mut sweep = Vec::with_capacity(entries.len());
    for entry in entries {
        let args = match entry {
            serde_json::Value::Array(inner) => inner
                .into_iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => Ok(s),
                    serde_json::Value::Number(n) => Ok(n.to_string()),
                    serde_json::Value::Bool(b) => Ok(b.to_string()),
                    other => anyhow::bail!("unsupported argument {other}"),
                })
                .collect::<anyhow::Result<Vec<_>>>()?,
            serde_json::Value::String(s) => vec![s],
            serde_json::Value::Number(n) => vec![n.to_string()],
            other => anyhow::bail!("unsupported sweep entry {other}"),
        };
        sweep.push(args);
    }
    Ok(sweep)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bench: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let Command::Run {
        workload,
        args,
        reps,
        timeout_ms,
        trigger_ms,
        clock,
        fencing,
        race_window_ms,
        parallel,
        out,
    } = cli.command;

    let clock_mode = clock
        .parse::<ClockMode>()
        .map_err(|e| anyhow::anyhow!(e))?;
    let fencing = match fencing.as_str() {
        "on" => true,
        "off" => false,
        other => anyhow::bail!("--fencing must be on|off, got {other:?}"),
    };

    let plan = BenchPlan {
        workload,
        args_sweep: parse_sweep(&args)?,
        repetitions: reps,
        timeout_ms,
        trigger_ms,
        clock_mode,
        fencing,
        race_window_ms,
        parallelism: parallel,
    };

    let outcome = run_plan(&plan)?;
    emit_csv(&outcome.samples, &out)?;
    print_summary(&mut std::io::stdout().lock(), &outcome.summary)?;
    println!(
        "{} samples written to {} ({} failed)",
        outcome.samples.len(),
        out.display(),
        outcome.samples.iter().filter(|s| s.failed).count()
    );

    if outcome.failed_fraction > 0.5 {
        eprintln!("bench: more than half of the runs failed");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
