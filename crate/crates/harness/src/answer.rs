//! Answer-format parsing: `****` provisional lines, `####` final lines.

use genpipe::Decimal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Provisional,
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerValue {
    Number(Decimal),
    /// An explicit "I don't know".
    Unknown,
    /// A final marker whose value did not parse; counts as wrong but still
    /// as format-following.
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEvent {
    pub kind: AnswerKind,
    pub value: AnswerValue,
    pub raw_text: String,
}

/// All answer events in `text`, in line order: one provisional per parseable
/// `****` line, plus at most one final from the last `####` line.
pub fn answer_events(text: &str) -> Vec<AnswerEvent> {
    let mut events: Vec<(usize, AnswerEvent)> = Vec::new();
    let mut final_event: Option<(usize, AnswerEvent)> = None;
    for (line_idx, line) in text.lines().enumerate() {
        if let Some(rest) = marked_rest(line, "****", '*') {
            // Provisional lines only count when they carry a value; bold
            // markdown or decorative rules are not answers.
            if let Some(value) = parse_value(rest) {
                events.push((
                    line_idx,
                    AnswerEvent {
                        kind: AnswerKind::Provisional,
                        value,
                        raw_text: line.trim().to_string(),
                    },
                ));
            }
        } else if let Some(rest) = marked_rest(line, "####", '#') {
            let value = parse_value(rest).unwrap_or(AnswerValue::Unparseable);
            final_event = Some((
                line_idx,
                AnswerEvent {
                    kind: AnswerKind::Final,
                    value,
                    raw_text: line.trim().to_string(),
                },
            ));
        }
    }
    if let Some(event) = final_event {
        events.push(event);
        events.sort_by_key(|(idx, _)| *idx);
    }
    events.into_iter().map(|(_, e)| e).collect()
}

/// The final answer in `text`, if any `####` line exists (the last one wins).
pub fn extract_answer(text: &str) -> Option<AnswerEvent> {
    answer_events(text)
        .into_iter()
        .rev()
        .find(|e| e.kind == AnswerKind::Final)
}

/// Strips `marker` off the front of a trimmed line. Lines continuing with
/// the marker character (`#####`, `*****`) are markdown, not answers.
fn marked_rest<'a>(line: &'a str, marker: &str, marker_char: char) -> Option<&'a str> {
    let rest = line.trim_start().strip_prefix(marker)?;
    if rest.starts_with(marker_char) {
        return None;
    }
    Some(rest)
}

fn parse_value(rest: &str) -> Option<AnswerValue> {
    let rest = rest.trim();
    if rest.is_empty() {
        return None;
    }
    let folded: String = rest
        .to_lowercase()
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .collect();
    if folded.contains("i don't know") {
        return Some(AnswerValue::Unknown);
    }
    let token = rest.split_whitespace().next()?;
    token.parse::<Decimal>().ok().map(AnswerValue::Number)
}
