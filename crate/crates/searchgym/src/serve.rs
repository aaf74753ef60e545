//! `serve`: expose one built database over the HTTP tool protocol until
//! interrupted, then flush every open session's trace to disk.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use genpipe::read_tasks;
use harness::EvalSetting;
use store::{load_index, HashedBowEmbedder};
use toolsrv::{router, Engine, EngineConfig};

use crate::build::sidecar_paths;
use crate::config::FileConfig;
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct ServeArgs {
    /// Database file produced by `build`.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Evaluation setting; decides which tools are exposed [default: zeroshot].
    #[arg(long)]
    pub setting: Option<String>,
    /// Bind address [default: 127.0.0.1].
    #[arg(long)]
    pub host: Option<String>,
    /// Port to listen on; 0 picks an ephemeral port [default: 8080].
    #[arg(long)]
    pub port: Option<u16>,
    /// Tool rounds allowed per session [default: 50].
    #[arg(long)]
    pub max_rounds: Option<u32>,
    /// Directory receiving one trace JSON per session at shutdown.
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
}

/// Reconstructs an engine from a database file and its tasks sidecar. The
/// embedder is rebuilt at the persisted dimension, so query-time vectors
/// match the indexed ones.
pub fn load_engine(
    db: &Path,
    setting: EvalSetting,
    max_rounds: u32,
) -> Result<Engine, CliError> {
    if !db.exists() {
        return Err(CliError::io(db, "no such file"));
    }
    let index = load_index(db).map_err(|e| CliError::Data(format!("{}: {e}", db.display())))?;
    let (tasks_path, _, _) = sidecar_paths(db);
    if !tasks_path.exists() {
        return Err(CliError::io(&tasks_path, "no such file (expected next to the database)"));
    }
    let tasks = read_tasks(&tasks_path).map_err(|e| CliError::Data(e.to_string()))?;
    let embedder = Arc::new(HashedBowEmbedder::new(index.dimension()));
    Ok(Engine::new(
        index,
        embedder,
        tasks.iter().map(|t| t.source_problem_id.clone()),
        EngineConfig {
            setting: setting.tool_setting(),
            max_rounds,
        },
    ))
}

/// Writes one trace JSON per open session into `dir`.
pub fn flush_traces(engine: &Engine, dir: &Path) -> Result<usize, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let ids = engine.session_ids();
    for session_id in &ids {
        let trace = engine
            .export_trace(session_id)
            .map_err(|e| CliError::stage("trace export", e))?;
        let path = dir.join(format!("{session_id}.json"));
        let mut text =
            serde_json::to_string_pretty(&trace).map_err(|e| CliError::io(&path, e))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(ids.len())
}

pub fn cmd_serve(args: &ServeArgs, file: &FileConfig) -> Result<(), CliError> {
    let db = args
        .db
        .clone()
        .or_else(|| file.db.clone())
        .ok_or_else(|| CliError::Usage("serve needs --db".into()))?;
    let setting: EvalSetting = args
        .setting
        .clone()
        .or_else(|| file.setting.clone())
        .unwrap_or_else(|| "zeroshot".into())
        .parse()
        .map_err(CliError::Usage)?;
    let max_rounds = args.max_rounds.or(file.max_rounds).unwrap_or(50);
    let host = args
        .host
        .clone()
        .or_else(|| file.host.clone())
        .unwrap_or_else(|| "127.0.0.1".into());
    let port = args.port.or(file.port).unwrap_or(8080);
    let trace_dir = args.trace_dir.clone().or_else(|| file.trace_dir.clone());

    let engine = Arc::new(load_engine(&db, setting, max_rounds)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(2)
        .enable_all()
        .build()
        .map_err(|e| CliError::Serve(e.to_string()))?;

    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host.as_str(), port))
            .await
            .map_err(|e| CliError::Serve(format!("bind {host}:{port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| CliError::Serve(e.to_string()))?;
        println!("listening on http://{addr}");
        use std::io::Write;
        let _ = std::io::stdout().flush();
        log::info!(
            "serving {} tasks / {} documents ({}) from {}",
            engine.task_count(),
            engine.document_count(),
            setting,
            db.display()
        );
        axum::serve(listener, router(engine.clone()))
            .with_graceful_shutdown(shutdown_signal())
            .await
            .map_err(|e| CliError::Serve(e.to_string()))
    })?;

    if let Some(dir) = trace_dir {
        let flushed = flush_traces(&engine, &dir)?;
        log::info!("flushed {flushed} session trace(s) to {}", dir.display());
    }
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut stream) => {
                stream.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = terminate => {}
    }
}
