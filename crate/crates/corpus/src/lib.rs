//! Core corpus model shared by the generation pipeline and the serving stack.
//!
//! A corpus is a set of word problems. Each problem names the entities it is
//! about; problems that mention the same entity would collide if they were
//! placed in one shared document database, so the corpus layer builds an
//! entity-conflict graph and assigns every problem a month-granularity
//! timestamp via greedy graph coloring. Two problems that share an entity are
//! guaranteed different months, which keeps their documents distinguishable
//! after they are pooled into a single searchable environment.

mod graph;
mod names;
mod problem;
mod timestamp;

pub use graph::{build_entity_graph, color_graph, EntityGraph};
pub use names::{assign_names, NamePools};
pub use problem::{read_problems, write_problems, Problem, ProblemId};
pub use timestamp::{assign_timestamps, Timestamp};

use thiserror::Error;

/// Errors produced while loading or transforming a corpus.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed problem record: {source}")]
    Parse {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("duplicate problem id `{0}`")]
    DuplicateId(ProblemId),
    #[error("problem `{id}` is invalid: {reason}")]
    InvalidProblem { id: ProblemId, reason: String },
    #[error("invalid timestamp `{0}`: expected YYYY-MM with month 01-12")]
    InvalidTimestamp(String),
    #[error("name pools exhausted: needed {needed} distinct full names, pools provide {available}")]
    NamePoolExhausted { needed: usize, available: usize },
}
