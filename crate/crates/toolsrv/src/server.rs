//! HTTP front end: POST /session, POST /tool, GET /trace/{id}, GET /schema.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::routing::{get, post};
use axum::{Json, Router};

use crate::engine::Engine;
use crate::wire::{
    codes, OpenSessionRequest, OpenSessionResponse, SchemaResponse, ToolRequest, ToolResponse,
    TraceResponse, WireError,
};

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/session", post(open_session))
        .route("/tool", post(call_tool))
        .route("/trace/{session_id}", get(trace))
        .route("/schema", get(schema))
        .with_state(engine)
}

async fn open_session(
    State(engine): State<Arc<Engine>>,
    Json(request): Json<OpenSessionRequest>,
) -> Json<OpenSessionResponse> {
    Json(match engine.open_session(&request.task_id) {
        Ok(session_id) => OpenSessionResponse {
            session_id: Some(session_id),
            error: None,
        },
        Err(error) => OpenSessionResponse {
            session_id: None,
            error: Some(error),
        },
    })
}

async fn call_tool(
    State(engine): State<Arc<Engine>>,
    Json(request): Json<ToolRequest>,
) -> Json<ToolResponse> {
    // Retrieval is CPU work; keep it off the async workers.
    let response = tokio::task::spawn_blocking(move || {
        engine.call_tool(&request.session_id, &request.tool_name, &request.arguments)
    })
    .await
    .unwrap_or_else(|_| {
        ToolResponse::failure(WireError::new(codes::INTERNAL, "tool worker panicked"))
    });
    Json(response)
}

async fn trace(
    State(engine): State<Arc<Engine>>,
    Path(session_id): Path<String>,
) -> Json<TraceResponse> {
    Json(match engine.export_trace(&session_id) {
        Ok(trace) => TraceResponse {
            trace: Some(trace),
            error: None,
        },
        Err(error) => TraceResponse {
            trace: None,
            error: Some(error),
        },
    })
}

async fn schema(State(engine): State<Arc<Engine>>) -> Json<SchemaResponse> {
    Json(engine.schema())
}

/// Serves until the process is stopped.
pub async fn serve(engine: Arc<Engine>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!(
        "serving {} tasks / {} documents ({}) on {}",
        engine.task_count(),
        engine.document_count(),
        engine.setting().name(),
        listener.local_addr()?
    );
    axum::serve(listener, router(engine)).await
}

/// A background server bound to an ephemeral localhost port. Shuts down
/// gracefully when dropped.
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<tokio::sync::oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}

/// Starts the server on its own thread and runtime; useful for tests and
/// for embedding the service in non-async binaries.
pub fn spawn_server(engine: Arc<Engine>) -> std::io::Result<ServerHandle> {
    let (addr_tx, addr_rx) = std::sync::mpsc::channel();
    let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
    let thread = std::thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .expect("tokio runtime");
        runtime.block_on(async move {
            let listener = match tokio::net::TcpListener::bind(("127.0.0.1", 0)).await {
                Ok(listener) => listener,
                Err(e) => {
                    let _ = addr_tx.send(Err(e));
                    return;
                }
            };
            let addr = listener.local_addr().expect("bound socket has an address");
            let _ = addr_tx.send(Ok(addr));
            let _ = axum::serve(listener, router(engine))
                .with_graceful_shutdown(async {
                    let _ = stop_rx.await;
                })
                .await;
        });
    });
    let addr = addr_rx
        .recv()
        .map_err(|_| std::io::Error::other("server thread exited before binding"))??;
    Ok(ServerHandle {
        addr,
        shutdown: Some(stop_tx),
        thread: Some(thread),
    })
}
