//! The text-model abstraction every pipeline stage is written against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sampling parameters for one completion call.
///
/// `attempt` carries the retry index (0-based) so deterministic backends can
/// vary their output across retries instead of looping on the same reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionParams {
    pub temperature: f32,
    pub max_tokens: u32,
    pub attempt: u32,
}

impl Default for CompletionParams {
    fn default() -> Self {
        Self {
            temperature: 0.0,
            max_tokens: 2048,
            attempt: 0,
        }
    }
}

impl CompletionParams {
    pub fn with_attempt(&self, attempt: u32) -> Self {
        Self { attempt, ..self.clone() }
    }
}

/// Errors a text-model backend can produce.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model API returned status {status}: {message}")]
    Api { status: u16, message: String },
    #[error("transport error talking to model API: {0}")]
    Transport(String),
    #[error("environment variable `{0}` with the API key is not set")]
    MissingApiKey(String),
    #[error("model returned an empty completion")]
    EmptyCompletion,
}

/// A text completion backend.
///
/// Implementations must be safe to call from multiple threads at once; the
/// orchestrator fans problems out across a worker pool. The in-repo mock is
/// fully deterministic for a fixed seed, which is what makes pipeline replay
/// tests possible.
pub trait TextModel: Send + Sync {
    fn complete(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, ModelError>;
}

impl<M: TextModel + ?Sized> TextModel for &M {
    fn complete(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, ModelError> {
        (**self).complete(system_prompt, user_prompt, params)
    }
}

impl<M: TextModel + ?Sized> TextModel for std::sync::Arc<M> {
    fn complete(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, ModelError> {
        (**self).complete(system_prompt, user_prompt, params)
    }
}

/// Number of attempts each stage makes before giving up on a model reply.
pub const MAX_ATTEMPTS: u32 = 3;

/// Runs `call` up to [`MAX_ATTEMPTS`] times, passing the attempt index, until
/// `parse` accepts the completion. Returns the parsed value or the last raw
/// output for error reporting.
pub fn complete_with_retries<T>(
    model: &dyn TextModel,
    system_prompt: &str,
    user_prompt: &str,
    params: &CompletionParams,
    mut parse: impl FnMut(&str) -> Option<T>,
) -> Result<T, RetriesExhausted> {
    let mut last_output = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        match model.complete(system_prompt, user_prompt, &params.with_attempt(attempt)) {
            Ok(output) => {
                if let Some(value) = parse(&output) {
                    return Ok(value);
                }
                last_output = output;
            }
            Err(err) => {
                log::warn!("model call failed on attempt {attempt}: {err}");
                last_output = format!("<model error: {err}>");
            }
        }
    }
    Err(RetriesExhausted {
        attempts: MAX_ATTEMPTS,
        last_output: truncate_for_error(&last_output),
    })
}

/// All retries failed; carries the final raw output for diagnostics.
#[derive(Debug)]
pub struct RetriesExhausted {
    pub attempts: u32,
    pub last_output: String,
}

fn truncate_for_error(s: &str) -> String {
    const LIMIT: usize = 600;
    if s.len() <= LIMIT {
        s.to_string()
    } else {
        let mut cut = LIMIT;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        format!("{}…", &s[..cut])
    }
}

/// Extracts the first balanced JSON object from a completion, tolerating
/// markdown fences and prose around it.
pub fn extract_json_object(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    None
}

/// Parses the first JSON object in a completion into `T`.
pub fn parse_json_reply<T: serde::de::DeserializeOwned>(text: &str) -> Option<T> {
    serde_json::from_str(extract_json_object(text)?).ok()
}
