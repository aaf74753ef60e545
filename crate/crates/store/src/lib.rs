//! Document store: embeddings, an exact vector index with paginated
//! retrieval, durable persistence, and benchmark split construction.
//!
//! Retrieval is an exact linear scan — corpora stay small enough (tens of
//! thousands of documents) that exactness costs little and buys
//! brute-force-comparable behavior in tests. Ranking is total: descending
//! cosine similarity, ties by ascending doc id.

mod embed;
mod index;
mod persist;
mod remote;
mod splits;

pub use embed::{cosine_similarity, Embedder, HashedBowEmbedder};
pub use index::{
    index_documents, next_page, search, IndexEntry, PageResult, SearchCursor, VectorIndex,
    EXHAUSTED_MESSAGE, MAX_NEXT_PAGES, PAGE_SIZE,
};
pub use persist::{load_index, persist_index};
pub use remote::{RemoteEmbedder, RemoteEmbedderConfig};
pub use splits::{make_splits, SplitData, SplitName, Splits};

use thiserror::Error;

/// Errors from the store layer.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot index an empty document set")]
    EmptyIndex,
    #[error("empty query")]
    EmptyQuery,
    #[error("embedding dimension mismatch for `{doc_id}`: expected {expected}, got {got}")]
    DimensionMismatch {
        doc_id: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate doc id `{0}` in index")]
    DuplicateDocId(String),
    #[error("cursor does not belong to this index")]
    ForeignCursor,
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt database file {path}: {reason}")]
    Corrupt { path: String, reason: String },
    #[error("unsupported database version {found} in {path} (expected {expected})")]
    VersionMismatch {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("embedding API error: {0}")]
    Embedding(String),
}
