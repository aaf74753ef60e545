//! Agent adapters: the step interface plus scripted and oracle players.

use std::collections::VecDeque;

use genpipe::{Document, Task};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use toolsrv::ToolSchema;

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnRole {
    User,
    Assistant,
    Tool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub role: TurnRole,
    pub content: String,
}

/// The transcript an agent sees: the task question plus every tool exchange
/// so far. System prompts belong to the agent, not the transcript.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Conversation {
    pub turns: Vec<Turn>,
}

impl Conversation {
    pub fn with_question(question: &str) -> Self {
        Self {
            turns: vec![Turn {
                role: TurnRole::User,
                content: question.to_string(),
            }],
        }
    }

    pub fn push_assistant(&mut self, content: impl Into<String>) {
        self.turns.push(Turn {
            role: TurnRole::Assistant,
            content: content.into(),
        });
    }

    pub fn push_tool(&mut self, content: impl Into<String>) {
        self.turns.push(Turn {
            role: TurnRole::Tool,
            content: content.into(),
        });
    }

    pub fn question(&self) -> &str {
        self.turns
            .first()
            .filter(|t| t.role == TurnRole::User)
            .map(|t| t.content.as_str())
            .unwrap_or_default()
    }
}

/// One agent decision: call a tool (optionally with accompanying reasoning
/// text) or stop with final text.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentMove {
    ToolCall {
        tool_name: String,
        arguments: Value,
        /// Free-form reasoning emitted alongside the call; may carry
        /// provisional `****` lines.
        text: String,
        tokens_generated: u64,
    },
    FinalText {
        text: String,
        tokens_generated: u64,
    },
}

impl AgentMove {
    pub fn tool(tool_name: &str, arguments: Value) -> Self {
        let tokens_generated = estimate_tokens(&arguments.to_string());
        AgentMove::ToolCall {
            tool_name: tool_name.to_string(),
            arguments,
            text: String::new(),
            tokens_generated,
        }
    }

    pub fn tool_with_text(tool_name: &str, arguments: Value, text: &str) -> Self {
        let tokens_generated =
            estimate_tokens(text) + estimate_tokens(&arguments.to_string());
        AgentMove::ToolCall {
            tool_name: tool_name.to_string(),
            arguments,
            text: text.to_string(),
            tokens_generated,
        }
    }

    pub fn answer(text: &str) -> Self {
        AgentMove::FinalText {
            text: text.to_string(),
            tokens_generated: estimate_tokens(text),
        }
    }
}

/// Whitespace token count — the fallback for adapters whose backend does
/// not report generated-token usage.
pub fn estimate_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Decides the next move from the conversation so far and the advertised
/// tool schemas.
pub trait AgentAdapter: Send {
    fn step(
        &mut self,
        conversation: &Conversation,
        tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError>;
}

/// Plays back a fixed list of moves; answers "I don't know" if asked to act
/// beyond its script. Deterministic by construction.
pub struct ScriptedAgent {
    script: VecDeque<AgentMove>,
}

impl ScriptedAgent {
    pub fn new(moves: impl IntoIterator<Item = AgentMove>) -> Self {
        Self {
            script: moves.into_iter().collect(),
        }
    }
}

impl AgentAdapter for ScriptedAgent {
    fn step(
        &mut self,
        _conversation: &Conversation,
        _tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError> {
        Ok(self
            .script
            .pop_front()
            .unwrap_or_else(|| AgentMove::answer("#### I don't know")))
    }
}

/// Searches each of its task's documents by exact content — the document
/// ranks itself first — then answers the gold value. A full-knowledge
/// reference player: accuracy and search-complete both come out 1.
pub struct OracleAgent {
    queries: VecDeque<String>,
    final_text: String,
}

impl OracleAgent {
    /// `documents` may be the whole split; only the task's own documents
    /// (matched by source problem id) are queried, in premise order.
    pub fn new(task: &Task, documents: &[Document]) -> Self {
        let mut own: Vec<&Document> = documents
            .iter()
            .filter(|d| d.source.0 == task.source_problem_id)
            .collect();
        own.sort_by_key(|d| d.source.1);
        Self {
            queries: own.iter().map(|d| d.content.clone()).collect(),
            final_text: format!("#### {}", task.gold_answer),
        }
    }
}

impl AgentAdapter for OracleAgent {
    fn step(
        &mut self,
        _conversation: &Conversation,
        _tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError> {
        Ok(match self.queries.pop_front() {
            Some(query) => AgentMove::tool("search_information", json!({ "query": query })),
            None => AgentMove::answer(&self.final_text),
        })
    }
}
