use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use wardgen_service::{api_cors, router, AppState};

#[derive(Debug, Parser)]
#[command(
    name = "wardgen-service",
    version,
    about = "HTTP API of the instance generator wizard"
)]
struct Args {
    #[arg(long, env = "WARDGEN_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    #[arg(long, env = "WARDGEN_PORT", default_value_t = 8080)]
    port: u16,
    /// Directory holding stored templates.
    #[arg(long, env = "WARDGEN_TEMPLATES", default_value = "templates")]
    templates_dir: PathBuf,
    /// Seconds a finished job's archive stays downloadable.
    #[arg(long, env = "WARDGEN_JOB_TTL", default_value_t = 3600)]
    job_ttl: u64,
    /// Origin allowed by CORS, or `*`.
    #[arg(
        long,
        env = "WARDGEN_CORS_ORIGIN",
        default_value = "http://localhost:5173"
    )]
    cors_origin: String,
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let state = AppState::new(args.templates_dir, Duration::from_secs(args.job_ttl));
    let app = router(state).layer(api_cors(&args.cors_origin)?);
    let addr = SocketAddr::new(args.bind, args.port);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{addr}");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
