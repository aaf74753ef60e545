//! Stage 1: entity detection.

use corpus::Problem;
use serde::Deserialize;
use serde_json::json;

use crate::model::{complete_with_retries, parse_json_reply, CompletionParams, TextModel};
use crate::{templates, GenError};

/// Result of detecting the core narrative entity of a problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectedEntity {
    pub names: Vec<String>,
    pub is_generic: bool,
}

#[derive(Deserialize)]
struct EntityReply {
    entity: EntityBody,
}

#[derive(Deserialize)]
struct EntityBody {
    name: NameField,
    is_generic: bool,
}

/// The model may return one name or a list of equally important names.
#[derive(Deserialize)]
#[serde(untagged)]
enum NameField {
    One(String),
    Many(Vec<String>),
}

/// Asks the model for the core entity of `problem`.
pub fn detect_entity(problem: &Problem, model: &dyn TextModel) -> Result<DetectedEntity, GenError> {
    let user = json!({ "problem": problem.text }).to_string();
    let parsed = complete_with_retries(
        model,
        templates::ENTITY_EXTRACTION,
        &user,
        &CompletionParams::default(),
        |text| {
            let reply: EntityReply = parse_json_reply(text)?;
            let names = match reply.entity.name {
                NameField::One(n) => vec![n],
                NameField::Many(ns) => ns,
            };
            let names: Vec<String> = names
                .into_iter()
                .map(|n| n.trim().to_string())
                .filter(|n| !n.is_empty())
                .collect();
            if names.is_empty() {
                return None;
            }
            Some(DetectedEntity {
                names,
                is_generic: reply.entity.is_generic,
            })
        },
    )
    .map_err(|e| GenError::BadModelOutput {
        stage: "entity detection",
        problem_id: problem.id.clone(),
        attempts: e.attempts,
        last_output: e.last_output,
    })?;
    Ok(parsed)
}
