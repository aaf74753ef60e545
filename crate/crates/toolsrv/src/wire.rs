//! Wire protocol types. Every response is self-describing JSON.

use genpipe::{DocMetadata, Document};
use serde::{Deserialize, Serialize};

/// Stable machine-readable error codes.
pub mod codes {
    pub const UNKNOWN_TASK: &str = "unknown_task";
    pub const UNKNOWN_SESSION: &str = "unknown_session";
    pub const BUSY: &str = "busy";
    pub const UNKNOWN_TOOL: &str = "unknown_tool";
    pub const BAD_ARGUMENTS: &str = "bad_arguments";
    pub const NO_ACTIVE_SEARCH: &str = "no_active_search";
    pub const EMPTY_QUERY: &str = "empty_query";
    pub const INTERNAL: &str = "internal";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireError {
    pub code: String,
    pub message: String,
}

impl WireError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self {
            code: code.to_string(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for WireError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// The view of a document an agent is allowed to see: no generation
/// provenance, just id, content, and display metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireDocument {
    pub doc_id: String,
    pub content: String,
    pub metadata: DocMetadata,
}

impl From<&Document> for WireDocument {
    fn from(doc: &Document) -> Self {
        Self {
            doc_id: doc.doc_id.clone(),
            content: doc.content.clone(),
            metadata: doc.metadata.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpenSessionRequest {
    pub task_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpenSessionResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToolRequest {
    pub session_id: String,
    pub tool_name: String,
    #[serde(default)]
    pub arguments: serde_json::Value,
}

/// Successful tool outcomes. A `think_tool` echo is a `results` with no
/// documents and the thought in `text`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ToolOutcome {
    Results {
        documents: Vec<WireDocument>,
        #[serde(default, skip_serializing_if = "String::is_empty")]
        text: String,
    },
    Exhausted {
        message: String,
    },
    LimitReached {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ok: Option<ToolOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
}

impl ToolResponse {
    pub fn success(outcome: ToolOutcome) -> Self {
        Self {
            ok: Some(outcome),
            error: None,
        }
    }

    pub fn failure(error: WireError) -> Self {
        Self {
            ok: None,
            error: Some(error),
        }
    }
}

/// One entry of a session's call log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based round this call consumed.
    pub round: u32,
    pub tool: String,
    pub arguments: serde_json::Value,
    pub result_summary: String,
    /// Doc ids returned by this call, in rank order; empty for non-retrieval
    /// outcomes.
    pub doc_ids: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub session_id: String,
    pub task_id: String,
    pub rounds_used: u32,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Copy with all wall-clock fields set to zero, for replay comparison.
    pub fn zeroed_timestamps(mut self) -> Trace {
        for step in &mut self.steps {
            step.elapsed_ms = 0;
        }
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<WireError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    pub description: String,
    /// JSON-schema object describing the arguments.
    pub parameters: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub max_rounds: u32,
    pub max_next_pages: u32,
    pub page_size: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaResponse {
    pub setting: String,
    pub tools: Vec<ToolSchema>,
    pub limits: Limits,
}
