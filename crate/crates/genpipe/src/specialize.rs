//! Stage 2: rewriting generic problems around an assigned name.

use corpus::Problem;
use serde::Deserialize;
use serde_json::json;

use crate::model::{complete_with_retries, parse_json_reply, CompletionParams, TextModel};
use crate::numeric::number_multiset;
use crate::{templates, GenError};

#[derive(Deserialize)]
struct SpecializeReply {
    rewritten_question: String,
}

/// Rewrites a generic problem to star `name`, verifying that the rewrite
/// kept every number intact (multiset of number tokens unchanged). Replies
/// that alter numbers are treated as parse failures and retried.
pub fn specialize_entity(
    problem: &Problem,
    generic_entity: &str,
    name: &str,
    model: &dyn TextModel,
) -> Result<String, GenError> {
    let user = json!({
        "problem": problem.text,
        "generic_entity": generic_entity,
        "name": name,
    })
    .to_string();
    let expected = number_multiset(&problem.text);
    let mut saw_changed_numbers = false;
    let result = complete_with_retries(
        model,
        templates::SPECIALIZE,
        &user,
        &CompletionParams::default(),
        |text| {
            let reply: SpecializeReply = parse_json_reply(text)?;
            let rewritten = reply.rewritten_question.trim().to_string();
            if rewritten.is_empty() || !rewritten.contains(name) {
                return None;
            }
            if number_multiset(&rewritten) != expected {
                saw_changed_numbers = true;
                return None;
            }
            Some(rewritten)
        },
    );
    match result {
        Ok(text) => Ok(text),
        Err(e) if saw_changed_numbers => {
            let _ = e;
            Err(GenError::NumbersChanged {
                problem_id: problem.id.clone(),
            })
        }
        Err(e) => Err(GenError::BadModelOutput {
            stage: "entity specialization",
            problem_id: problem.id.clone(),
            attempts: e.attempts,
            last_output: e.last_output,
        }),
    }
}
