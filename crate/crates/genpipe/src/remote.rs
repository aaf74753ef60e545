//! Chat-completions HTTP backend for real model runs.

use serde::Deserialize;
use serde_json::json;

use crate::model::{CompletionParams, ModelError, TextModel};

/// Connection settings for an OpenAI-compatible chat-completions endpoint.
#[derive(Debug, Clone)]
pub struct RemoteModelConfig {
    /// Base URL up to but excluding `/chat/completions`.
    pub base_url: String,
    /// Model identifier sent in the request body.
    pub model: String,
    /// Environment variable holding the bearer token.
    pub api_key_env: String,
    pub timeout_secs: u64,
}

impl Default for RemoteModelConfig {
    fn default() -> Self {
        Self {
            base_url: "http://localhost:8000/v1".into(),
            model: "default".into(),
            api_key_env: "MODEL_API_KEY".into(),
            timeout_secs: 120,
        }
    }
}

/// Blocking chat-completions client.
pub struct RemoteModel {
    config: RemoteModelConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl RemoteModel {
    pub fn new(config: RemoteModelConfig) -> Result<Self, ModelError> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| ModelError::MissingApiKey(config.api_key_env.clone()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ModelError::Transport(e.to_string()))?;
        Ok(Self {
            config,
            api_key,
            client,
        })
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

impl TextModel for RemoteModel {
    fn complete(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, ModelError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = json!({
            "model": self.config.model,
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
            "messages": [
                { "role": "system", "content": system_prompt },
                { "role": "user", "content": user_prompt },
            ],
        });
        let response = self
            .client
            .post(&url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| ModelError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| ModelError::Transport(e.to_string()))?;
        if !status.is_success() {
            let mut message = text;
            message.truncate(500);
            return Err(ModelError::Api {
                status: status.as_u16(),
                message,
            });
        }
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| ModelError::Transport(e.to_string()))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if content.is_empty() {
            return Err(ModelError::EmptyCompletion);
        }
        Ok(content)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_api_key_is_reported() {
        let config = RemoteModelConfig {
            api_key_env: "DEFINITELY_UNSET_KEY_VAR_12345".into(),
            ..Default::default()
        };
        match RemoteModel::new(config) {
            Err(ModelError::MissingApiKey(v)) => assert!(v.contains("12345")),
            Err(other) => panic!("unexpected error: {other}"),
            Ok(_) => panic!("construction must fail without the key"),
        }
    }
}
