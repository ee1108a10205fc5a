//! Serves the gateway API: action registry, invocations, activation records,
//! and chain reports.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;

use ckptchain_core::clock::ClockMode;
use ckptchain_core::gateway::{ActionConfig, Gateway};
use ckptchain_core::stores::RepoConfig;
use ckptchain_server::client::HttpRemoteAction;
use ckptchain_server::gateway_http::gateway_app;

#[derive(Parser, Debug)]
#[command(name = "lf-gateway", about = "Desk-scale FaaS gateway")]
struct Args {
    /// Listen port.
    #[arg(long, env = "LF_GATEWAY_PORT", default_value_t = 8088)]
    port: u16,

    /// Clock mode (real|simulated). Remote actions require real.
    #[arg(long, env = "LF_CLOCK_MODE", default_value = "real")]
    clock: ClockModeArg,

    /// Log level filter.
    #[arg(long, env = "LF_LOG_LEVEL", default_value = "info")]
    log_level: String,

    /// Root of the shared checkpoint/results repositories.
    #[arg(long, env = "LF_DATA_DIR")]
    data_dir: Option<PathBuf>,

    /// JSON file with an array of action configs to register at startup.
    #[arg(long)]
    actions_file: Option<PathBuf>,

    /// Remote action bindings, `name=http://host:port`, repeatable. Each
    /// name must also appear in the actions file.
    #[arg(long = "remote")]
    remotes: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
struct ClockModeArg(ClockMode);

impl std::str::FromStr for ClockModeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<ClockMode>().map(ClockModeArg)
    }
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    env_logger::Builder::new().parse_filters(&args.log_level).init();

    let repo_cfg = match &args.data_dir {
        Some(root) => RepoConfig::local_fs(root),
        None => RepoConfig::memory(),
    };
    let gateway = Gateway::builder(args.clock.0)
        .repo_config(&repo_cfg)?
        .build();

    let mut actions: Vec<ActionConfig> = match &args.actions_file {
        Some(path) => serde_json::from_slice(&std::fs::read(path)?)?,
        None => Vec::new(),
    };
    if actions.is_empty() {
        // a ready-to-use default so the gateway is immediately invocable
        actions.push(ActionConfig::new("counter"));
    }

    let remotes: Vec<(String, String)> = args
        .remotes
        .iter()
        .map(|spec| {
            spec.split_once('=')
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .ok_or_else(|| anyhow::anyhow!("remote binding must be name=url, got {spec:?}"))
        })
        .collect::<Result<_, _>>()?;

    for action in actions {
        let name = action.name.clone();
        match remotes.iter().find(|(n, _)| *n == name) {
            Some((_, url)) => {
                let margin = action.timeout_ms + 30_000;
                gateway.register_remote_action(
                    action,
                    Arc::new(HttpRemoteAction::new(url.clone(), margin)),
                )?;
                log::info!("registered remote action {name} -> {url}");
            }
            None => {
                gateway.register_action(action)?;
                log::info!("registered in-process action {name}");
            }
        }
    }

    let app = gateway_app(gateway);
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], args.port));
    log::info!("gateway listening on {addr}");
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await?;
    Ok(())
}
