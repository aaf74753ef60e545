//! Episode runner and metric suite for search-based reasoning agents.
//!
//! An [`AgentAdapter`] plays a task against a tool service
//! ([`toolsrv::ToolTransport`]): each step either invokes a tool — the
//! observation is appended to the conversation — or emits final text, whose
//! `####` line ends the episode. [`score`] turns the resulting
//! [`EpisodeTrace`] into the per-task metric row (Acc, SR, Dur(s), SC, ER,
//! FF, PremT, TotTok, Tok/R), [`interaction_scaling`] computes the
//! accuracy-at-n curve, and [`run_eval`] repeats every task over several
//! seeds and aggregates a [`MetricsReport`] that serializes to JSON and CSV.

mod agent;
mod answer;
mod episode;
mod model_agent;
mod prompts;
mod report;
mod runner;
mod score;

pub use agent::{
    estimate_tokens, AgentAdapter, AgentMove, Conversation, OracleAgent, ScriptedAgent, Turn,
    TurnRole,
};
pub use answer::{answer_events, extract_answer, AnswerEvent, AnswerKind, AnswerValue};
pub use episode::{render_observation, run_episode, EpisodeConfig, EpisodeStep, EpisodeTrace};
pub use model_agent::ModelAgent;
pub use prompts::EvalSetting;
pub use report::{
    write_csv, write_json, AggregateRow, MetricsReport, TaskRow, REPORT_SCHEMA_VERSION,
};
pub use runner::{run_eval, EvalConfig, ScoredEpisode};
pub use score::{interaction_scaling, oracle_doc_ids, score, TaskScore};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The agent itself failed (transport to the model, malformed reply).
    #[error("agent: {0}")]
    Agent(String),
    /// The tool service could not be reached or answered out of protocol.
    #[error(transparent)]
    Client(#[from] toolsrv::ClientError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
