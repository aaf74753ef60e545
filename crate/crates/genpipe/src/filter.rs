//! Stage 7: solvability filtering.

use serde::Deserialize;
use serde_json::json;

use crate::model::{complete_with_retries, parse_json_reply, CompletionParams, TextModel};
use crate::task::{Document, Task};
use crate::templates;

#[derive(Deserialize)]
struct SolveReply {
    final_answer: String,
}

/// Returns true iff the model, given the question and the task's finished
/// documents, produces an answer numerically equal to the gold answer.
/// Any model failure counts as unsolvable (the task is dropped, never
/// kept on faith).
pub fn filter_solvable(task: &Task, documents: &[Document], model: &dyn TextModel) -> bool {
    let user = json!({
        "question": task.question,
        "documents": documents
            .iter()
            .map(|d| json!({ "doc_id": d.doc_id, "content": d.content }))
            .collect::<Vec<_>>(),
    })
    .to_string();

    let reply = complete_with_retries(
        model,
        templates::SOLVE,
        &user,
        &CompletionParams::default(),
        parse_json_reply::<SolveReply>,
    );
    match reply {
        Ok(r) => match r.final_answer.trim().parse::<crate::Decimal>() {
            Ok(answer) => answer == task.gold_answer,
            Err(_) => false,
        },
        Err(e) => {
            log::warn!(
                "solvability check failed for task {}: {}",
                task.source_problem_id,
                e.last_output
            );
            false
        }
    }
}
