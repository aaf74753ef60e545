//! Stage 4: hierarchical document generation.
//!
//! One planning round establishes a consistent narrative across all
//! premises; then each premise gets its own generation round that produces
//! exactly one document. Model-supplied doc ids are namespaced under the
//! problem id, which keeps them unique corpus-wide as long as they are
//! unique within the task (enforced here, with retries).

use std::collections::BTreeSet;

use corpus::Timestamp;
use serde::Deserialize;
use serde_json::json;

use crate::model::{
    complete_with_retries, parse_json_reply, CompletionParams, TextModel, MAX_ATTEMPTS,
};
use crate::task::{DocMetadata, Document, Task};
use crate::{templates, GenError};

#[derive(Deserialize)]
struct DocReply {
    document: String,
    metadata: DocReplyMetadata,
    id: String,
}

#[derive(Deserialize)]
struct DocReplyMetadata {
    #[serde(rename = "Type")]
    doc_type: String,
    #[serde(rename = "Timestamp")]
    timestamp: String,
    names: String,
}

/// Generates one document per premise of `task`.
pub fn generate_documents(
    task: &Task,
    entity_names: &[String],
    model: &dyn TextModel,
) -> Result<Vec<Document>, GenError> {
    let ts = task.timestamp.to_string();
    let plan_user = json!({
        "round": "plan",
        "question": task.question,
        "premises": task.premises.iter().map(|p| json!({ "content": p })).collect::<Vec<_>>(),
        "timestamp": ts,
    })
    .to_string();
    let plan = complete_with_retries(
        model,
        templates::DOCGEN,
        &plan_user,
        &CompletionParams::default(),
        |text| {
            let t = text.trim();
            (!t.is_empty()).then(|| t.to_string())
        },
    )
    .map_err(|e| GenError::BadModelOutput {
        stage: "document planning",
        problem_id: task.source_problem_id.clone(),
        attempts: e.attempts,
        last_output: e.last_output,
    })?;

    let mut documents = Vec::with_capacity(task.premises.len());
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    for (index, premise) in task.premises.iter().enumerate() {
        let user = json!({
            "round": "document",
            "premise": premise,
            "premise_index": index,
            "context_premises": task.premises,
            "plan": plan,
            "timestamp": ts,
            "entity_names": entity_names,
        })
        .to_string();

        let mut duplicate_id: Option<String> = None;
        let result = complete_with_retries(
            model,
            templates::DOCGEN,
            &user,
            &CompletionParams::default(),
            |text| {
                let reply: DocReply = parse_json_reply(text)?;
                let id = reply.id.trim().to_string();
                if id.is_empty() || reply.document.trim().is_empty() {
                    return None;
                }
                if seen_ids.contains(&id) {
                    duplicate_id = Some(id);
                    return None;
                }
                let timestamp = parse_month_prefix(&reply.metadata.timestamp)?;
                if timestamp != task.timestamp {
                    return None;
                }
                Some((reply, id, timestamp))
            },
        );
        let (reply, id, timestamp) = match result {
            Ok(v) => v,
            Err(_) if duplicate_id.is_some() => {
                return Err(GenError::DuplicateDocId {
                    problem_id: task.source_problem_id.clone(),
                    doc_id: duplicate_id.unwrap(),
                });
            }
            Err(e) => {
                return Err(GenError::BadModelOutput {
                    stage: "document generation",
                    problem_id: task.source_problem_id.clone(),
                    attempts: e.attempts,
                    last_output: e.last_output,
                });
            }
        };
        seen_ids.insert(id.clone());
        documents.push(Document {
            doc_id: format!("{}/{}", task.source_problem_id, id),
            content: reply.document.trim().to_string(),
            metadata: DocMetadata {
                timestamp,
                names: reply
                    .metadata
                    .names
                    .split(',')
                    .map(|n| n.trim().to_string())
                    .filter(|n| !n.is_empty())
                    .collect(),
                doc_type: reply.metadata.doc_type.trim().to_string(),
            },
            source: (task.source_problem_id.clone(), index),
            anonymized: false,
        });
    }
    debug_assert_eq!(documents.len(), task.premises.len());
    let _ = MAX_ATTEMPTS;
    Ok(documents)
}

/// Accepts `"2018-03-20T10:00:00"`, `"2018-03"`, etc., keeping the month.
fn parse_month_prefix(s: &str) -> Option<Timestamp> {
    let s = s.trim();
    if s.len() < 7 {
        return None;
    }
    s[..7].parse().ok()
}
