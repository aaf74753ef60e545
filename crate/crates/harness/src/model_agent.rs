//! Text-model-backed agent: renders the transcript into a completion
//! prompt and parses the reply as either a JSON tool call or final text.

use genpipe::{CompletionParams, TextModel};
use serde_json::{json, Value};
use toolsrv::ToolSchema;

use crate::agent::{estimate_tokens, AgentAdapter, AgentMove, Conversation, TurnRole};
use crate::HarnessError;

const CALL_FORMAT: &str = "To call a tool, reply with exactly one JSON object on its own, shaped as\n\
{\"tool\": \"<tool name>\", \"arguments\": {...}}\n\
and nothing else. To finish, reply with plain text instead (no JSON object) ending in your final-answer line.";

/// Drives episodes with any [`TextModel`]. Sampling defaults: temperature
/// 0.4, 4096 max tokens.
pub struct ModelAgent<M> {
    model: M,
    system_prompt: String,
    params: CompletionParams,
}

impl<M: TextModel> ModelAgent<M> {
    pub fn new(model: M, system_prompt: impl Into<String>) -> Self {
        Self {
            model,
            system_prompt: system_prompt.into(),
            params: CompletionParams {
                temperature: 0.4,
                max_tokens: 4096,
                attempt: 0,
            },
        }
    }

    pub fn with_params(mut self, temperature: f32, max_tokens: u32) -> Self {
        self.params.temperature = temperature;
        self.params.max_tokens = max_tokens;
        self
    }

    fn render_system(&self, tools: &[ToolSchema]) -> String {
        let mut out = String::new();
        out.push_str(&self.system_prompt);
        out.push_str("\n\n## Available tools\n");
        for tool in tools {
            out.push_str(&format!(
                "- {}: {}\n  parameters: {}\n",
                tool.name, tool.description, tool.parameters
            ));
        }
        out.push('\n');
        out.push_str(CALL_FORMAT);
        out
    }
}

fn render_transcript(conversation: &Conversation) -> String {
    let mut out = String::new();
    for turn in &conversation.turns {
        let label = match turn.role {
            TurnRole::User => "Question",
            TurnRole::Assistant => "You",
            TurnRole::Tool => "Tool result",
        };
        out.push_str(&format!("{label}:\n{}\n\n", turn.content));
    }
    out.push_str("You:\n");
    out
}

fn parse_move(reply: &str) -> AgentMove {
    if let Some(candidate) = genpipe::model::extract_json_object(reply) {
        if let Ok(value) = serde_json::from_str::<Value>(candidate) {
            if let Some(tool_name) = value.get("tool").and_then(Value::as_str) {
                let arguments = value.get("arguments").cloned().unwrap_or_else(|| json!({}));
                return AgentMove::ToolCall {
                    tool_name: tool_name.to_string(),
                    arguments,
                    text: reply.to_string(),
                    tokens_generated: estimate_tokens(reply),
                };
            }
        }
    }
    AgentMove::FinalText {
        text: reply.to_string(),
        tokens_generated: estimate_tokens(reply),
    }
}

impl<M: TextModel + Send> AgentAdapter for ModelAgent<M> {
    fn step(
        &mut self,
        conversation: &Conversation,
        tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError> {
        let system = self.render_system(tools);
        let transcript = render_transcript(conversation);
        let reply = self
            .model
            .complete(&system, &transcript, &self.params)
            .map_err(|e| HarnessError::Agent(e.to_string()))?;
        Ok(parse_move(&reply))
    }
}
