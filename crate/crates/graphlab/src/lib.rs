//! Agentic reasoning graph analysis: clusters a document database with
//! K-means, maps tool-call queries onto the cluster graph as paths, labels
//! each step explore/exploit/revisit, and aggregates path and span
//! statistics.

mod kmeans;
mod model;
mod path;
mod stats;

pub use kmeans::{kmeans, kmeans_detailed, KmeansConfig};
pub use model::ReasoningGraphModel;
pub use path::{classify_steps, map_path, ratios, Ratios, ReasoningPath, StepKind, TraceCall};
pub use stats::{
    span_stats, trace_graph_stats, GraphBucket, GraphReport, PerTraceRow, SpanStats, Summary,
    TraceGraphStats, GRAPH_SCHEMA_VERSION,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("k-means needs at least as many vectors as clusters: got {points} vectors for K = {k}; choose a smaller K")]
    TooFewPoints { points: usize, k: usize },
    #[error("K must be at least 1")]
    ZeroK,
    #[error("ids and vectors differ in length: {ids} ids, {vectors} vectors")]
    LengthMismatch { ids: usize, vectors: usize },
    #[error("duplicate id `{0}` in clustering input")]
    DuplicateId(String),
    #[error("vector {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("vector {index} contains a non-finite value")]
    NonFiniteInput { index: usize },
    #[error("model is corrupt: {0}")]
    CorruptModel(String),
    #[error("next_page at step {index} has no preceding search to inherit a node from")]
    NextPageFirst { index: usize },
    #[error("tool call `{tool}` at step {index} is missing its query text")]
    MissingQuery { tool: String, index: usize },
    #[error("unknown tool `{tool}` at step {index}")]
    UnknownTool { tool: String, index: usize },
    #[error("document `{doc_id}` has no cluster assignment")]
    UnassignedDocument { doc_id: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
