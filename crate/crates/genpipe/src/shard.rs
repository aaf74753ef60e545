//! Stage 3: sharding a problem into premises plus a question.

use corpus::{Problem, Timestamp};
use serde::Deserialize;
use serde_json::json;

use crate::model::{complete_with_retries, parse_json_reply, CompletionParams, TextModel};
use crate::task::Task;
use crate::{GenError, templates};

const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// Renders `"2024-01"` as `"January 2024"`. Returns `None` for strings that
/// are not canonical timestamps.
pub fn month_phrase(ts: &str) -> Option<String> {
    let t: Timestamp = ts.parse().ok()?;
    Some(format!(
        "{} {}",
        MONTH_NAMES[(t.month() - 1) as usize],
        t.year()
    ))
}

#[derive(Deserialize)]
struct ShardReply {
    premises: Vec<PremiseEntry>,
    question: String,
}

#[derive(Deserialize)]
struct PremiseEntry {
    content: String,
}

/// Decomposes `problem` into a [`Task`].
///
/// `embed_timestamp` is set when the problem's entity appears in other
/// problems too; the timestamp is then passed to the model, which folds it
/// into the question so the task stays unambiguous inside a shared document
/// database. The reply is rejected (and retried) if the premise list is
/// empty or the requested timestamp is missing from the question.
pub fn shard(
    problem: &Problem,
    timestamp: Timestamp,
    embed_timestamp: bool,
    model: &dyn TextModel,
) -> Result<Task, GenError> {
    let answer_text = problem
        .answer
        .clone()
        .ok_or_else(|| GenError::MissingAnswer {
            problem_id: problem.id.clone(),
        })?;
    let gold_answer = answer_text
        .parse()
        .map_err(|_| GenError::BadAnswer {
            problem_id: problem.id.clone(),
            answer: answer_text.clone(),
        })?;

    let ts_string = timestamp.to_string();
    let user = json!({
        "problem": problem.text,
        "timestamp": if embed_timestamp { Some(ts_string.as_str()) } else { None },
    })
    .to_string();

    let expected_phrase = embed_timestamp.then(|| month_phrase(&ts_string).expect("canonical"));
    let mut saw_empty_premises = false;
    let result = complete_with_retries(
        model,
        templates::SHARD,
        &user,
        &CompletionParams::default(),
        |text| {
            let reply: ShardReply = parse_json_reply(text)?;
            let premises: Vec<String> = reply
                .premises
                .into_iter()
                .map(|p| p.content.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect();
            if premises.is_empty() {
                saw_empty_premises = true;
                return None;
            }
            let question = reply.question.trim().to_string();
            if question.is_empty() {
                return None;
            }
            if let Some(phrase) = &expected_phrase {
                if !question.contains(phrase.as_str()) {
                    return None;
                }
            }
            Some((premises, question))
        },
    );
    let (premises, question) = match result {
        Ok(v) => v,
        Err(_) if saw_empty_premises => {
            return Err(GenError::EmptyPremises {
                problem_id: problem.id.clone(),
            })
        }
        Err(e) => {
            return Err(GenError::BadModelOutput {
                stage: "sharding",
                problem_id: problem.id.clone(),
                attempts: e.attempts,
                last_output: e.last_output,
            })
        }
    };

    Ok(Task {
        source_problem_id: problem.id.clone(),
        question,
        premises,
        gold_answer,
        timestamp,
    })
}
