//! Transports for driving an engine: in-process or over HTTP.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::engine::Engine;
use crate::wire::{
    OpenSessionRequest, OpenSessionResponse, SchemaResponse, ToolRequest, ToolResponse, Trace,
    TraceResponse, WireError,
};

#[derive(Debug, Error)]
pub enum ClientError {
    /// The request never produced a protocol-level reply.
    #[error("transport: {0}")]
    Transport(String),
    /// The service replied with a protocol error (unknown task/session, …).
    #[error("{code}: {message}")]
    Protocol { code: String, message: String },
}

impl From<WireError> for ClientError {
    fn from(e: WireError) -> Self {
        ClientError::Protocol {
            code: e.code,
            message: e.message,
        }
    }
}

/// One tool-protocol connection. Tool-level errors (bad arguments, unknown
/// tool, no active search) are data — they come back inside the
/// [`ToolResponse`], not as `Err`.
pub trait ToolTransport: Send + Sync {
    fn open_session(&self, task_id: &str) -> Result<String, ClientError>;
    fn call(&self, session_id: &str, tool_name: &str, arguments: Value)
        -> Result<ToolResponse, ClientError>;
    fn trace(&self, session_id: &str) -> Result<Trace, ClientError>;
    fn schema(&self) -> Result<SchemaResponse, ClientError>;
}

/// Drives an [`Engine`] in the same process.
pub struct LocalTransport {
    engine: Arc<Engine>,
}

impl LocalTransport {
    pub fn new(engine: Arc<Engine>) -> Self {
        Self { engine }
    }
}

impl ToolTransport for LocalTransport {
    fn open_session(&self, task_id: &str) -> Result<String, ClientError> {
        self.engine.open_session(task_id).map_err(Into::into)
    }

    fn call(
        &self,
        session_id: &str,
        tool_name: &str,
        arguments: Value,
    ) -> Result<ToolResponse, ClientError> {
        Ok(self.engine.call_tool(session_id, tool_name, &arguments))
    }

    fn trace(&self, session_id: &str) -> Result<Trace, ClientError> {
        self.engine.export_trace(session_id).map_err(Into::into)
    }

    fn schema(&self) -> Result<SchemaResponse, ClientError> {
        Ok(self.engine.schema())
    }
}

/// Blocking HTTP client for a served engine.
pub struct HttpTransport {
    base_url: String,
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(base_url: impl Into<String>) -> Result<Self, ClientError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(120))
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            client,
        })
    }

    fn post_json<B: Serialize, R: DeserializeOwned>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R, ClientError> {
        let url = format!("{}{path}", self.base_url);
        let response = self
            .client
            .post(&url)
            .json(body)
            .send()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Self::decode(url, response)
    }

    fn get_json<R: DeserializeOwned>(&self, path: &str) -> Result<R, ClientError> {
        let url = format!("{}{path}", self.base_url);
        let response = self
            .client
            .get(&url)
            .send()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Self::decode(url, response)
    }

    fn decode<R: DeserializeOwned>(
        url: String,
        response: reqwest::blocking::Response,
    ) -> Result<R, ClientError> {
        let status = response.status();
        if !status.is_success() {
            return Err(ClientError::Transport(format!("{status} from {url}")));
        }
        response
            .json()
            .map_err(|e| ClientError::Transport(format!("bad reply from {url}: {e}")))
    }
}

impl ToolTransport for HttpTransport {
    fn open_session(&self, task_id: &str) -> Result<String, ClientError> {
        let reply: OpenSessionResponse = self.post_json(
            "/session",
            &OpenSessionRequest {
                task_id: task_id.to_string(),
            },
        )?;
        if let Some(error) = reply.error {
            return Err(error.into());
        }
        reply
            .session_id
            .ok_or_else(|| ClientError::Transport("reply had neither session_id nor error".into()))
    }

    fn call(
        &self,
        session_id: &str,
        tool_name: &str,
        arguments: Value,
    ) -> Result<ToolResponse, ClientError> {
        self.post_json(
            "/tool",
            &ToolRequest {
                session_id: session_id.to_string(),
                tool_name: tool_name.to_string(),
                arguments,
            },
        )
    }

    fn trace(&self, session_id: &str) -> Result<Trace, ClientError> {
        let reply: TraceResponse = self.get_json(&format!("/trace/{session_id}"))?;
        if let Some(error) = reply.error {
            return Err(error.into());
        }
        reply
            .trace
            .ok_or_else(|| ClientError::Transport("reply had neither trace nor error".into()))
    }

    fn schema(&self) -> Result<SchemaResponse, ClientError> {
        self.get_json("/schema")
    }
}
