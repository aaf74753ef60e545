//! Episode loop: drives one agent against one task session and records a
//! replayable trace.

use std::time::Instant;

use genpipe::Task;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use toolsrv::{ToolOutcome, ToolResponse, ToolTransport};

use crate::agent::{AgentAdapter, AgentMove, Conversation};
use crate::answer::{self, AnswerEvent, AnswerKind};
use crate::HarnessError;

#[derive(Debug, Clone, Copy)]
pub struct EpisodeConfig {
    /// Client-side tool-call budget; mirrors the environment's session cap.
    pub max_rounds: u32,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self { max_rounds: 50 }
    }
}

/// One addressed tool call, as seen from the agent side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStep {
    pub tool_name: String,
    pub arguments: Value,
    pub returned_doc_ids: Vec<String>,
    pub tokens_generated: u64,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub task_id: String,
    pub steps: Vec<EpisodeStep>,
    /// Provisional and final answer lines in emission order.
    pub answer_events: Vec<AnswerEvent>,
    pub total_duration_s: f64,
    /// Set when the agent or its transport failed mid-episode; the partial
    /// trace above is still scored.
    pub failure: Option<String>,
}

impl EpisodeTrace {
    /// Copy with wall-clock fields zeroed, for replay comparisons.
    pub fn zeroed_durations(&self) -> Self {
        let mut out = self.clone();
        out.total_duration_s = 0.0;
        for step in &mut out.steps {
            step.duration_s = 0.0;
        }
        out
    }
}

/// Render a tool response as observation text for the agent. Stable across
/// runs: no wall-clock or session-local detail leaks in.
pub fn render_observation(response: &ToolResponse) -> String {
    if let Some(error) = &response.error {
        return format!("Tool error ({}): {}", error.code, error.message);
    }
    match &response.ok {
        Some(ToolOutcome::Results { documents, text }) => {
            if documents.is_empty() {
                return text.clone();
            }
            let mut out = String::new();
            for (i, doc) in documents.iter().enumerate() {
                if i > 0 {
                    out.push_str("\n\n");
                }
                out.push_str(&format!(
                    "Result {} — id: {} | type: {} | timestamp: {} | names: {}\n{}",
                    i + 1,
                    doc.doc_id,
                    doc.metadata.doc_type,
                    doc.metadata.timestamp,
                    doc.metadata.names.join(", "),
                    doc.content,
                ));
            }
            if !text.is_empty() {
                out.push_str("\n\n");
                out.push_str(text);
            }
            out
        }
        Some(ToolOutcome::Exhausted { message }) | Some(ToolOutcome::LimitReached { message }) => {
            message.clone()
        }
        None => String::from("(empty response)"),
    }
}

/// Run one episode: open a session, alternate agent moves and tool
/// responses until the agent finishes, fails, or the round budget is spent.
///
/// Agent and transport failures mid-episode are recorded on the trace, not
/// returned as errors; only session setup can fail outright.
pub fn run_episode(
    task: &Task,
    transport: &dyn ToolTransport,
    agent: &mut dyn AgentAdapter,
    config: &EpisodeConfig,
) -> Result<EpisodeTrace, HarnessError> {
    let schema = transport.schema()?;
    let session_id = transport.open_session(&task.source_problem_id)?;

    let mut conversation = Conversation::with_question(&task.question);
    let mut steps: Vec<EpisodeStep> = Vec::new();
    let mut events: Vec<AnswerEvent> = Vec::new();
    let mut failure = None;
    let episode_start = Instant::now();

    loop {
        let step_start = Instant::now();
        let mv = match agent.step(&conversation, &schema.tools) {
            Ok(mv) => mv,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        match mv {
            AgentMove::FinalText { text, .. } => {
                events.extend(answer::answer_events(&text));
                conversation.push_assistant(text);
                break;
            }
            AgentMove::ToolCall {
                tool_name,
                arguments,
                text,
                tokens_generated,
            } => {
                // Interleaved reasoning may carry provisional answers, but a
                // `####` line only counts on a finishing turn.
                events.extend(
                    answer::answer_events(&text)
                        .into_iter()
                        .filter(|e| e.kind == AnswerKind::Provisional),
                );
                if steps.len() as u32 >= config.max_rounds {
                    // Budget spent and the agent still wants tools: the
                    // trajectory is truncated without a final answer.
                    break;
                }
                let response = match transport.call(&session_id, &tool_name, arguments.clone()) {
                    Ok(r) => r,
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                };
                if matches!(response.ok, Some(ToolOutcome::LimitReached { .. })) {
                    // The environment refused the round, so it is not a step.
                    break;
                }
                let returned_doc_ids = match &response.ok {
                    Some(ToolOutcome::Results { documents, .. }) => {
                        documents.iter().map(|d| d.doc_id.clone()).collect()
                    }
                    _ => Vec::new(),
                };
                let observation = render_observation(&response);
                let call_text = if text.is_empty() {
                    serde_json::json!({ "tool": tool_name, "arguments": arguments }).to_string()
                } else {
                    text
                };
                conversation.push_assistant(call_text);
                conversation.push_tool(observation);
                steps.push(EpisodeStep {
                    tool_name,
                    arguments,
                    returned_doc_ids,
                    tokens_generated,
                    duration_s: step_start.elapsed().as_secs_f64(),
                });
            }
        }
    }

    Ok(EpisodeTrace {
        task_id: task.source_problem_id.clone(),
        steps,
        answer_events: events,
        total_duration_s: episode_start.elapsed().as_secs_f64(),
        failure,
    })
}
