//! Sessionized tool service for search-based reasoning environments.
//!
//! The service fronts a document index with five tools: the base pair
//! `search_information` / `next_page`, plus the augmented `think_tool`,
//! `explore`, and `revisit`. Which tools a launch advertises is a
//! [`ToolSetting`]; retrieval behaves identically for every search-shaped
//! tool, only the logged name differs.
//!
//! Sessions are opened per task and give out at most 50 tool rounds. Every
//! addressed call — including ones that end in a tool-level error — consumes
//! exactly one round and lands in the session's call log, which
//! [`Engine::export_trace`] returns in call order. Once the budget is spent,
//! further calls get a `limit_reached` response and mutate nothing.
//!
//! The same engine can be driven in process ([`LocalTransport`]) or over
//! HTTP ([`serve`] + [`HttpTransport`]): POST `/session`, POST `/tool`,
//! GET `/trace/{id}`, GET `/schema`.

mod client;
mod engine;
mod server;
mod tools;
mod wire;

pub use client::{ClientError, HttpTransport, LocalTransport, ToolTransport};
pub use engine::{Engine, EngineConfig, MAX_ROUNDS};
pub use server::{router, serve, spawn_server, ServerHandle};
pub use tools::{tool_names, tool_schemas, ToolSetting};
pub use wire::{
    codes, Limits, OpenSessionRequest, OpenSessionResponse, SchemaResponse, ToolOutcome,
    ToolRequest, ToolResponse, ToolSchema, Trace, TraceResponse, TraceStep, WireDocument,
    WireError,
};
