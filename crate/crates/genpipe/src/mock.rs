//! Deterministic mock text model.
//!
//! The mock recognizes which pipeline stage is calling from the system
//! prompt, parses the JSON user payload, and produces a schema-conformant
//! reply. Every reply is a pure function of `(seed, prompts, attempt)`: the
//! per-call RNG is seeded by hashing the prompts, so concurrent calls and
//! replays always agree.
//!
//! Two behaviors make the mock useful beyond smoke tests:
//!
//! - a handful of canonical fixtures reproduce well-known worked examples
//!   (clip sales, pipe fitting, cupcakes) byte-for-byte;
//! - document generation leaks a number from another premise with
//!   probability `leak_rate`, giving the independence checker real work.
//!
//! Fault injection (`MockFault`) exists solely to exercise retry and error
//! paths in tests.

use std::sync::atomic::{AtomicU32, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::model::{CompletionParams, ModelError, TextModel};
use crate::numeric::{extract_number_tokens, number_token_spans};
use crate::shard::month_phrase;
use crate::templates::markers;

/// Deliberately wrong behaviors for error-path tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MockFault {
    #[default]
    None,
    /// The first `times` calls return non-JSON chatter, then behave normally.
    MalformedJson { times: u32 },
    /// Document rounds always return the same doc id.
    DuplicateDocIds,
    /// Sharding returns an empty premise list.
    EmptyPremises,
}

/// Seeded, deterministic [`TextModel`] covering every pipeline stage.
pub struct MockModel {
    seed: u64,
    leak_rate: f64,
    fault: MockFault,
    calls: AtomicU32,
}

impl MockModel {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            leak_rate: 0.15,
            fault: MockFault::None,
            calls: AtomicU32::new(0),
        }
    }

    /// Probability that a generated document quotes a number from another
    /// premise (exercises the independence checker).
    pub fn with_leak_rate(mut self, leak_rate: f64) -> Self {
        self.leak_rate = leak_rate;
        self
    }

    pub fn with_fault(mut self, fault: MockFault) -> Self {
        self.fault = fault;
        self
    }

    fn rng_for(&self, system: &str, user: &str, attempt: u32) -> ChaCha8Rng {
        let mut h = 0xcbf29ce484222325u64;
        for chunk in [
            &self.seed.to_le_bytes()[..],
            system.as_bytes(),
            b"\x1f",
            user.as_bytes(),
            &attempt.to_le_bytes()[..],
        ] {
            for &b in chunk {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        ChaCha8Rng::seed_from_u64(h)
    }
}

impl TextModel for MockModel {
    fn complete(
        &self,
        system_prompt: &str,
        user_prompt: &str,
        params: &CompletionParams,
    ) -> Result<String, ModelError> {
        let call_no = self.calls.fetch_add(1, Ordering::SeqCst);
        if let MockFault::MalformedJson { times } = self.fault {
            if call_no < times {
                return Ok("Sure! Let me think about that for a moment...".into());
            }
        }
        let user: Value = serde_json::from_str(user_prompt)
            .unwrap_or_else(|_| json!({ "raw": user_prompt }));
        let mut rng = self.rng_for(system_prompt, user_prompt, params.attempt);

        let reply = if system_prompt.contains(markers::ENTITY_EXTRACTION) {
            entity_reply(&user)
        } else if system_prompt.contains(markers::SPECIALIZE) {
            specialize_reply(&user)
        } else if system_prompt.contains(markers::SHARD) {
            if self.fault == MockFault::EmptyPremises {
                json!({ "premises": [], "question": "?" }).to_string()
            } else {
                shard_reply(&user)
            }
        } else if system_prompt.contains(markers::DOCGEN) {
            match user["round"].as_str() {
                Some("plan") => plan_reply(&user),
                _ => {
                    if self.fault == MockFault::DuplicateDocIds {
                        doc_reply(&user, &mut rng, self.leak_rate, Some("doc_dup"))
                    } else {
                        doc_reply(&user, &mut rng, self.leak_rate, None)
                    }
                }
            }
        } else if system_prompt.contains(markers::INDEPENDENCE) {
            independence_reply(&user)
        } else if system_prompt.contains(markers::ANONYMIZE) {
            anonymize_reply(&user)
        } else if system_prompt.contains(markers::SOLVE) {
            solve_reply(&user)
        } else {
            return Err(ModelError::Api {
                status: 400,
                message: "mock model does not recognize this prompt".into(),
            });
        };
        Ok(reply)
    }
}

// ---------------------------------------------------------------------------
// Stage replies
// ---------------------------------------------------------------------------

/// Words that look like names (capitalized) but never are.
const STOPWORDS: &[&str] = &[
    "a", "an", "the", "on", "in", "at", "of", "to", "by", "for", "with", "from", "and", "or",
    "but", "if", "then", "after", "before", "how", "what", "when", "where", "who", "why", "each",
    "every", "he", "she", "they", "it", "his", "her", "their", "its", "this", "that", "these",
    "those", "there", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday",
    "sunday", "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december", "dear", "diary", "total", "altogether",
    "recall", "note", "subject", "hi", "best", "entry", "log", "filed",
];

fn words(text: &str) -> Vec<&str> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .collect()
}

fn detected_names(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for w in words(text) {
        let mut chars = w.chars();
        let first = match chars.next() {
            Some(c) => c,
            None => continue,
        };
        if !first.is_uppercase() || w.len() < 2 {
            continue;
        }
        let base = w.trim_end_matches("'s").trim_end_matches('\'');
        if base.len() < 2 || STOPWORDS.contains(&base.to_lowercase().as_str()) {
            continue;
        }
        if !out.iter().any(|n| n == base) {
            out.push(base.to_string());
        }
    }
    out
}

fn entity_reply(user: &Value) -> String {
    let problem = user["problem"].as_str().unwrap_or_default();

    // Canonical fixtures.
    if problem.starts_with("Natalia sold clips") {
        return json!({ "entity": { "name": "Natalia", "is_generic": false } }).to_string();
    }
    if problem.starts_with("Alice and Bob equally split") {
        return json!({ "entity": { "name": ["Alice", "Bob"], "is_generic": false } }).to_string();
    }
    if problem.starts_with("A farmer has 50 chickens") {
        return json!({ "entity": { "name": "a farmer", "is_generic": true } }).to_string();
    }

    let names = detected_names(problem);
    if !names.is_empty() {
        let name: Value = if names.len() == 1 {
            Value::String(names[0].clone())
        } else {
            Value::Array(names.into_iter().map(Value::String).collect())
        };
        return json!({ "entity": { "name": name, "is_generic": false } }).to_string();
    }

    // Generic fallback: "A farmer ...", "The store ...".
    let ws = words(problem);
    let name = match ws.as_slice() {
        [art, noun, ..] if ["a", "an", "the"].contains(&art.to_lowercase().as_str()) => {
            format!("{} {}", art.to_lowercase(), noun.to_lowercase())
        }
        [first, ..] => format!("a {}", first.to_lowercase()),
        [] => "an unknown entity".to_string(),
    };
    json!({ "entity": { "name": name, "is_generic": true } }).to_string()
}

fn specialize_reply(user: &Value) -> String {
    let problem = user["problem"].as_str().unwrap_or_default();
    let phrase = user["generic_entity"].as_str().unwrap_or_default();
    let name = user["name"].as_str().unwrap_or("Somebody");

    let mut text = problem.to_string();
    let mut variants: Vec<String> = Vec::new();
    for v in [phrase.to_string(), capitalize(phrase)] {
        if !v.is_empty() && !variants.contains(&v) {
            variants.push(v);
        }
    }
    // "a farmer" also appears later as "the farmer".
    if let Some(noun) = phrase
        .strip_prefix("a ")
        .or_else(|| phrase.strip_prefix("an "))
    {
        for v in [format!("the {noun}"), format!("The {noun}")] {
            if !variants.contains(&v) {
                variants.push(v);
            }
        }
    }
    for v in &variants {
        text = text.replace(v.as_str(), name);
    }
    json!({ "rewritten_question": text }).to_string()
}

fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        current.push(c);
        if c == '.' || c == '?' || c == '!' {
            let s = current.trim().to_string();
            if !s.is_empty() {
                out.push(s);
            }
            current.clear();
        }
    }
    let tail = current.trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

fn shard_reply(user: &Value) -> String {
    let problem = user["problem"].as_str().unwrap_or_default();
    let timestamp = user["timestamp"].as_str();

    // Canonical fixtures.
    if problem.starts_with("Natalia sold clips to 48 of her friends in April") {
        return json!({
            "premises": [
                { "content": "Natalia sold clips to 48 of her friends in April." },
                { "content": "Natalia sold half as many clips in May as she did in April." }
            ],
            "question": embed_timestamp("How many clips did Natalia sell altogether?", timestamp)
        })
        .to_string();
    }
    if problem.starts_with("Edward needs 40 feet of copper pipe") {
        return json!({
            "premises": [
                { "content": "Edward needs to use 40 feet of copper pipe to complete the bathroom job." },
                { "content": "For every 5 feet of pipe, Edward must use one tightening bolt." },
                { "content": "For every bolt, Edward uses two washers." },
                { "content": "Edward buys a bag of 20 washers for the job." }
            ],
            "question": embed_timestamp("How many washers will Edward have left?", timestamp)
        })
        .to_string();
    }
    if problem.starts_with("Sarah started her bakery with 100 cupcakes") {
        return json!({
            "premises": [
                { "content": "Sarah started her bakery with 100 cupcakes." },
                { "content": "Sarah sold 25 cupcakes every hour." },
                { "content": "Sarah sold cupcakes for 3 hours." }
            ],
            "question": embed_timestamp("How many cupcakes did Sarah have left?", timestamp)
        })
        .to_string();
    }

    let mut premises = Vec::new();
    let mut question = String::new();
    for s in sentences(problem) {
        if s.ends_with('?') {
            question = s;
        } else {
            premises.push(json!({ "content": s }));
        }
    }
    if question.is_empty() {
        question = "What is the total?".into();
    }
    json!({
        "premises": premises,
        "question": embed_timestamp(&question, timestamp)
    })
    .to_string()
}

/// Folds a `"YYYY-MM"` timestamp into a question: `"... in January 2024?"`.
fn embed_timestamp(question: &str, timestamp: Option<&str>) -> String {
    match timestamp {
        None => question.to_string(),
        Some(ts) => {
            let phrase = month_phrase(ts).unwrap_or_else(|| ts.to_string());
            match question.strip_suffix('?') {
                Some(stem) => format!("{stem} in {phrase}?"),
                None => format!("{question} (as of {phrase})"),
            }
        }
    }
}

fn plan_reply(user: &Value) -> String {
    let premises = user["premises"].as_array().cloned().unwrap_or_default();
    let mut plan = String::from("Narrative plan: one document per premise, diverse formats.\n");
    for (i, p) in premises.iter().enumerate() {
        let kind = DOC_TYPES[i % DOC_TYPES.len()];
        plan.push_str(&format!(
            "{}. {} covering: {}\n",
            i + 1,
            kind,
            p["content"].as_str().unwrap_or_default()
        ));
    }
    plan.push_str("Timestamps stay in metadata, clustered around the provided month.");
    plan
}

const DOC_TYPES: &[&str] = &["Chat History", "Diary Entry", "Email", "Receipt", "Inventory Log"];

fn slugify(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if (c == ' ' || c == '_' || c == '-') && !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn doc_reply(user: &Value, rng: &mut ChaCha8Rng, leak_rate: f64, forced_id: Option<&str>) -> String {
    let premise = user["premise"].as_str().unwrap_or_default();
    let index = user["premise_index"].as_u64().unwrap_or(0) as usize;
    let timestamp = user["timestamp"].as_str().unwrap_or("1990-01");
    let entity_names: Vec<String> = user["entity_names"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();

    // Canonical fixture: the April clip-sales chat.
    if forced_id.is_none() && premise.starts_with("Natalia sold clips to 48 of her friends in April") {
        return json!({
            "document": "Dad: How are your clip sales going?\nNatalia: Pretty good! Looking back, in April I sold clips to 48 of my friends.\nDad: Nice! Keep it up.",
            "metadata": {
                "Type": "Chat History",
                "Timestamp": format!("{timestamp}-20T10:00:00"),
                "names": "Natalia,Dad"
            },
            "id": "natalia_april_sales_chat"
        })
        .to_string();
    }

    let speaker = entity_names
        .first()
        .map(|n| n.split_whitespace().next().unwrap_or(n).to_string())
        .unwrap_or_else(|| "the owner".to_string());
    let doc_type = DOC_TYPES[index % DOC_TYPES.len()];
    let mut names = vec![speaker.clone()];
    let body = match doc_type {
        "Chat History" => {
            names.push("Dad".into());
            format!(
                "Dad: Quick check-in, any updates?\n{speaker}: {premise}\nDad: Good to know!"
            )
        }
        "Diary Entry" => format!("Dear diary, a note so I don't forget. {premise} More soon."),
        "Email" => format!(
            "Subject: Status update\nHi team,\nFor the record: {premise}\nBest,\n{speaker}"
        ),
        "Receipt" => format!(
            "--- RECORD SLIP ---\nEntry: {premise}\nFiled by: {speaker}\n-------------------"
        ),
        _ => format!("[LOG] Entry recorded. Details: {premise} End of entry."),
    };

    // Occasionally quote a figure from a different premise; the independence
    // checker is expected to catch and remove it.
    let mut body = body;
    let others: Vec<String> = user["context_premises"]
        .as_array()
        .map(|a| {
            a.iter()
                .enumerate()
                .filter(|(i, _)| *i != index)
                .filter_map(|(_, v)| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    let other_numbers: Vec<String> = others
        .iter()
        .flat_map(|p| extract_number_tokens(p))
        .filter(|t| t.chars().filter(|c| c.is_ascii_digit()).count() >= 2)
        .collect();
    if !other_numbers.is_empty() && rng.random::<f64>() < leak_rate {
        let leaked = other_numbers[rng.random_range(0..other_numbers.len())].clone();
        body.push_str(&format!(
            "\n(Recall from earlier: the figure {leaked} still stands.)"
        ));
    }

    let id = match forced_id {
        Some(id) => id.to_string(),
        None => format!(
            "{}_{}_{}",
            slugify(&speaker),
            slugify(doc_type),
            index + 1
        ),
    };
    json!({
        "document": body,
        "metadata": {
            "Type": doc_type,
            "Timestamp": format!("{timestamp}-15T10:00:00"),
            "names": names.join(",")
        },
        "id": id
    })
    .to_string()
}

/// Numbers with at least two digits that appear in `text`.
fn significant_numbers(text: &str) -> Vec<String> {
    extract_number_tokens(text)
        .into_iter()
        .filter(|t| t.chars().filter(|c| c.is_ascii_digit()).count() >= 2)
        .collect()
}

fn independence_reply(user: &Value) -> String {
    let document = user["document"].as_str().unwrap_or_default();
    let target = user["target_premise"].as_str().unwrap_or_default();
    let others: Vec<String> = user["other_premises"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();

    // Canonical fixture: the May clip-sales log.
    if document == "May sales: 24 clips (half of April's 48)"
        && target.starts_with("Natalia sold half as many clips in May")
    {
        return json!({
            "is_independent": false,
            "violations": [
                "Contains specific number (48) from another premise",
                "Contains calculated value (24) not in premise"
            ],
            "proposed_document": "May sales update: Sold half as many clips as I did in April.",
            "reasoning": "Removed the specific April number (48) and the calculated May value (24), keeping only the relationship stated in the target premise."
        })
        .to_string();
    }

    let foreign: std::collections::BTreeSet<String> = others
        .iter()
        .flat_map(|p| significant_numbers(p))
        .collect();
    let leaked: Vec<String> = significant_numbers(document)
        .into_iter()
        .filter(|t| foreign.contains(t))
        .collect();

    if leaked.is_empty() {
        json!({
            "is_independent": true,
            "reasoning": "The document states only the target premise."
        })
        .to_string()
    } else {
        let mut patched = String::new();
        let mut last = 0;
        for (range, token) in number_token_spans(document) {
            if leaked.contains(&token) {
                patched.push_str(&document[last..range.start]);
                patched.push_str("some");
                last = range.end;
            }
        }
        patched.push_str(&document[last..]);
        let violations: Vec<String> = leaked
            .iter()
            .map(|t| format!("Contains specific number ({t}) from another premise"))
            .collect();
        json!({
            "is_independent": false,
            "violations": violations,
            "proposed_document": patched,
            "reasoning": "Replaced numbers that belong to other premises with vague wording."
        })
        .to_string()
    }
}

fn anonymize_reply(user: &Value) -> String {
    let document = user["document"].as_str().unwrap_or_default();
    let names: Vec<String> = user["names"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    let mut text = document.to_string();
    for name in &names {
        text = text.replace(&format!("{name}'s"), "someone's");
        text = text.replace(name.as_str(), "someone");
    }
    json!({
        "anonymized_document": text,
        "anonymization_notes": "Replaced explicit names with generic references."
    })
    .to_string()
}

fn solve_reply(user: &Value) -> String {
    use crate::numeric::Decimal;
    let question = user["question"].as_str().unwrap_or_default();
    let docs: Vec<String> = user["documents"]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|d| d["content"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();

    let mut numbers: Vec<Decimal> = Vec::new();
    for content in &docs {
        let tokens = extract_number_tokens(content);
        if tokens.is_empty() {
            return json!({ "final_answer": "unknown" }).to_string();
        }
        for t in tokens {
            if let Ok(d) = t.parse() {
                numbers.push(d);
            }
        }
    }
    if docs.is_empty() || numbers.is_empty() {
        return json!({ "final_answer": "unknown" }).to_string();
    }

    let answer = if question.contains(" pack") {
        if numbers.len() != 2 {
            return json!({ "final_answer": "unknown" }).to_string();
        }
        &numbers[0] * &numbers[1]
    } else {
        let mut acc = Decimal::zero();
        for n in &numbers {
            acc = &acc + n;
        }
        acc
    };
    json!({ "final_answer": answer.to_string() }).to_string()
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(model: &MockModel, system: &str, user: Value) -> String {
        model
            .complete(system, &user.to_string(), &CompletionParams::default())
            .unwrap()
    }

    #[test]
    fn replies_are_deterministic() {
        let m1 = MockModel::new(42);
        let m2 = MockModel::new(42);
        let user = json!({
            "round": "document",
            "premise": "Kara collected 17 apples on Monday.",
            "premise_index": 0,
            "context_premises": ["Kara collected 17 apples on Monday.", "Kara collected 25 apples on Tuesday."],
            "plan": "p",
            "timestamp": "1990-03",
            "entity_names": ["Kara"]
        });
        let a = call(&m1, crate::templates::DOCGEN, user.clone());
        let b = call(&m2, crate::templates::DOCGEN, user);
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_may_differ() {
        // Not a strict requirement, but the leak decision must key off the seed.
        let user = json!({
            "round": "document",
            "premise": "Kara collected 17 apples on Monday.",
            "premise_index": 0,
            "context_premises": ["Kara collected 17 apples on Monday.", "Kara collected 25 apples on Tuesday."],
            "plan": "p",
            "timestamp": "1990-03",
            "entity_names": ["Kara"]
        });
        let outputs: std::collections::BTreeSet<String> = (0..64)
            .map(|seed| {
                call(
                    &MockModel::new(seed).with_leak_rate(0.5),
                    crate::templates::DOCGEN,
                    user.clone(),
                )
            })
            .collect();
        assert!(outputs.len() > 1, "leak decision ignores the seed");
    }

    #[test]
    fn detects_heuristic_names() {
        assert_eq!(
            detected_names("On Monday, Kara collected 17 apples. How many in total?"),
            vec!["Kara".to_string()]
        );
        assert_eq!(
            detected_names("A farmer has 50 chickens."),
            Vec::<String>::new()
        );
    }

    #[test]
    fn unknown_prompts_are_rejected() {
        let m = MockModel::new(1);
        let err = m
            .complete("write me a poem", "{}", &CompletionParams::default())
            .unwrap_err();
        assert!(matches!(err, ModelError::Api { status: 400, .. }));
    }
}
