//! Client for an HTTP embeddings endpoint.

use serde::{Deserialize, Serialize};

use crate::embed::Embedder;
use crate::StoreError;

/// Connection settings for [`RemoteEmbedder`].
#[derive(Debug, Clone)]
pub struct RemoteEmbedderConfig {
    /// Base URL of the API, e.g. `http://localhost:8000/v1`.
    pub base_url: String,
    /// Model identifier sent with each request.
    pub model: String,
    /// Environment variable the API key is read from.
    pub api_key_env: String,
    /// Output dimension the endpoint is expected to return.
    pub dimension: usize,
    /// Request timeout in seconds.
    pub timeout_secs: u64,
}

impl Default for RemoteEmbedderConfig {
    fn default() -> Self {
        Self {
            base_url: "http://localhost:8000/v1".into(),
            model: "text-embedding".into(),
            api_key_env: "MODEL_API_KEY".into(),
            dimension: 1024,
            timeout_secs: 120,
        }
    }
}

/// An [`Embedder`] backed by a `POST {base_url}/embeddings` endpoint.
pub struct RemoteEmbedder {
    config: RemoteEmbedderConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct EmbeddingRequest<'a> {
    model: &'a str,
    input: &'a str,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingRow>,
}

#[derive(Deserialize)]
struct EmbeddingRow {
    embedding: Vec<f32>,
}

impl RemoteEmbedder {
    pub fn new(config: RemoteEmbedderConfig) -> Result<Self, StoreError> {
        let api_key = std::env::var(&config.api_key_env)
            .map_err(|_| StoreError::Embedding(format!("{} is not set", config.api_key_env)))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| StoreError::Embedding(e.to_string()))?;
        Ok(Self {
            config,
            api_key,
            client,
        })
    }

    fn embed_remote(&self, text: &str) -> Result<Vec<f32>, StoreError> {
        let url = format!("{}/embeddings", self.config.base_url.trim_end_matches('/'));
        let response = self
            .client
            .post(&url)
            .bearer_auth(&self.api_key)
            .json(&EmbeddingRequest {
                model: &self.config.model,
                input: text,
            })
            .send()
            .map_err(|e| StoreError::Embedding(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            let mut message = body.trim().to_string();
            message.truncate(500);
            return Err(StoreError::Embedding(format!("{status}: {message}")));
        }
        let parsed: EmbeddingResponse = response
            .json()
            .map_err(|e| StoreError::Embedding(e.to_string()))?;
        let row = parsed
            .data
            .into_iter()
            .next()
            .ok_or_else(|| StoreError::Embedding("empty embedding response".into()))?;
        if row.embedding.len() != self.config.dimension {
            return Err(StoreError::Embedding(format!(
                "expected dimension {}, got {}",
                self.config.dimension,
                row.embedding.len()
            )));
        }
        Ok(row.embedding)
    }
}

impl Embedder for RemoteEmbedder {
    fn dimension(&self) -> usize {
        self.config.dimension
    }

    fn embed(&self, text: &str) -> Vec<f32> {
        // The Embedder trait is infallible so the in-process pipeline stays
        // simple; a failed remote call is unrecoverable mid-index anyway.
        self.embed_remote(text)
            .unwrap_or_else(|e| panic!("remote embedding failed: {e}"))
    }
}
