//! Construction pipeline that turns a corpus of word problems into
//! search-based reasoning tasks backed by premise-level documents.
//!
//! The pipeline runs seven stages per problem, all driven by a pluggable
//! [`TextModel`]:
//!
//! 1. entity detection — find the core narrative entity and whether it is
//!    generic;
//! 2. entity specialization — rewrite generic problems around an assigned
//!    name;
//! 3. sharding — decompose the problem into self-contained premises plus a
//!    final question (with the task timestamp folded into the question when
//!    the entity appears in more than one problem);
//! 4. document generation — a planning round followed by one document per
//!    premise;
//! 5. independence verification — patch documents that leak information from
//!    other premises;
//! 6. anonymization — strip entity names from a seeded fraction of documents;
//! 7. solvability filtering — keep only tasks the model can still solve from
//!    the finished documents.
//!
//! A deterministic, seeded [`MockModel`] ships in-repo so the full pipeline is
//! testable without a remote model; real runs use a chat-completions-style
//! HTTP backend.

pub mod anonymize;
pub mod docgen;
pub mod entity;
pub mod filter;
pub mod independence;
pub mod mock;
pub mod model;
pub mod numeric;
pub mod orchestrate;
pub mod remote;
pub mod shard;
pub mod specialize;
pub mod synth;
pub mod task;
pub mod templates;

pub use mock::MockModel;
pub use model::{CompletionParams, ModelError, TextModel};
pub use numeric::Decimal;
pub use orchestrate::{run_pipeline, BuildOutput, DropRecord, PipelineConfig, PipelineStats};
pub use task::{read_documents, read_tasks, write_documents, write_tasks, DocMetadata, Document, Task};

use thiserror::Error;

/// Errors surfaced by pipeline stages.
#[derive(Debug, Error)]
pub enum GenError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error("{stage} for problem `{problem_id}`: unusable model output after {attempts} attempts; last output: {last_output:?}")]
    BadModelOutput {
        stage: &'static str,
        problem_id: String,
        attempts: u32,
        last_output: String,
    },
    #[error("specialization of `{problem_id}` changed the number set")]
    NumbersChanged { problem_id: String },
    #[error("sharding of `{problem_id}` produced no premises")]
    EmptyPremises { problem_id: String },
    #[error("problem `{problem_id}` has no gold answer; cannot build a task")]
    MissingAnswer { problem_id: String },
    #[error("problem `{problem_id}` has unparseable gold answer {answer:?}")]
    BadAnswer { problem_id: String, answer: String },
    #[error("document generation for `{problem_id}` returned duplicate doc id `{doc_id}`")]
    DuplicateDocId { problem_id: String, doc_id: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {source}")]
    Parse {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}
