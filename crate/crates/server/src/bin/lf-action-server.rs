//! Serves one action instance over the platform action interface.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use ckptchain_core::runner::{RunLog, RunnerConfig};
use ckptchain_core::stores::{open_repos, RepoConfig};
use ckptchain_server::action::{action_app, ActionRuntimeConfig, ActionServer};
use ckptchain_server::client::HttpInvoker;

#[derive(Parser, Debug)]
#[command(name = "lf-action-server", about = "Action interface server (/init, /run)")]
struct Args {
    /// Listen port.
    #[arg(long, env = "LF_PORT", default_value_t = 8080)]
    port: u16,

    /// Log level filter (error|warn|info|debug|trace).
    #[arg(long, env = "LF_LOG_LEVEL", default_value = "info")]
    log_level: String,

    /// Directory for structured runner logs (JSONL per chain).
    #[arg(long, env = "LF_LOG_DIR")]
    log_dir: Option<PathBuf>,

    /// Scratch directory for checkpoint images in transit.
    #[arg(long, env = "LF_CKPT_DIR")]
    ckpt_dir: Option<PathBuf>,

    /// Root of the shared checkpoint/results repositories. Uses in-memory
    /// stores when omitted (single-process experiments only).
    #[arg(long, env = "LF_DATA_DIR")]
    data_dir: Option<PathBuf>,

    /// Checkpoint timer in milliseconds from receipt of /run.
    #[arg(long, env = "LF_TRIGGER_MS", default_value_t = 50_000)]
    trigger_ms: u64,

    /// Timeout assumed when a run payload has no deadline.
    #[arg(long, env = "LF_TIMEOUT_MS", default_value_t = 60_000)]
    timeout_ms: u64,

    /// Gateway base URL for self re-invocation (e.g. http://127.0.0.1:8088).
    #[arg(long, env = "LF_GATEWAY_URL")]
    gateway_url: Option<String>,

    /// Action name to re-invoke on the gateway.
    #[arg(long, env = "LF_ACTION_NAME", default_value = "action")]
    action_name: String,

    /// First-writer-wins result fencing.
    #[arg(long, env = "LF_FENCING", default_value = "on")]
    fencing: String,

    /// Queue concurrent runs instead of rejecting them with busy.
    #[arg(long, env = "LF_QUEUE_RUNS", default_value_t = false)]
    queue_runs: bool,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    env_logger::Builder::new().parse_filters(&args.log_level).init();

    let repo_cfg = match &args.data_dir {
        Some(root) => RepoConfig::local_fs(root),
        None => RepoConfig::memory(),
    };
    let clock = ckptchain_core::clock::clock_for(ckptchain_core::clock::ClockMode::Real);
    let (ckpt_repo, results) = open_repos(&repo_cfg, clock)?;

    let runner = RunnerConfig {
        checkpoint_trigger_ms: args.trigger_ms,
        fencing_enabled: args.fencing != "off",
        ..RunnerConfig::default()
    };
    let config = ActionRuntimeConfig {
        trigger_ms: args.trigger_ms,
        default_timeout_ms: args.timeout_ms,
        runner,
        queue_runs: args.queue_runs,
        scratch_dir: args
            .ckpt_dir
            .unwrap_or_else(|| std::env::temp_dir().join(format!("lf-action-{}", std::process::id()))),
    };
    let log = match &args.log_dir {
        Some(dir) => RunLog::dir(dir),
        None => RunLog::null(),
    };
    let invoker = args
        .gateway_url
        .as_ref()
        .map(|url| {
            Arc::new(HttpInvoker::new(url, &args.action_name)) as Arc<dyn ckptchain_core::runner::Invoker>
        });

    let server = ActionServer::new(config, ckpt_repo, results, invoker, None, log);
    let app = action_app(server);

    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], args.port));
    log::info!("action interface listening on {addr}");
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await?;
    Ok(())
}
