//! Per-task scoring and the interaction-scaling curve.

use std::collections::BTreeSet;

use genpipe::{Decimal, Document, Task};
use serde::{Deserialize, Serialize};

use crate::answer::{AnswerKind, AnswerValue};
use crate::episode::EpisodeTrace;

/// All per-task metrics for one episode.
///
/// Booleans aggregate to rates; `coverage_step` is the bookkeeping behind
/// `sc`/`er` and the scaling curve, not a reported column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    /// Final answer equals the gold value.
    pub acc: bool,
    /// Number of tool calls.
    pub sr: u32,
    /// Wall-clock duration of the episode in seconds.
    pub dur_s: f64,
    /// Found all relevant documents.
    pub sc: bool,
    /// Tool calls made after all relevant documents were found.
    pub er: u32,
    /// A final-answer line exists, regardless of correctness.
    pub ff: bool,
    /// Some provisional answer preceded the final one.
    pub premt: bool,
    /// Tokens generated across tool-call turns.
    pub tot_tok: u64,
    /// Tokens per round.
    pub tok_per_round: f64,
    /// Earliest 1-based step count whose responses cover every relevant
    /// document; `None` when coverage was never reached.
    pub coverage_step: Option<u32>,
}

/// The document ids relevant to a task: every document realized from its
/// premises, recovered via [`Document::source`].
pub fn oracle_doc_ids(task: &Task, documents: &[Document]) -> BTreeSet<String> {
    documents
        .iter()
        .filter(|d| d.source.0 == task.source_problem_id)
        .map(|d| d.doc_id.clone())
        .collect()
}

/// Score one episode against the gold answer and the task's relevant
/// document ids.
pub fn score(trace: &EpisodeTrace, gold: &Decimal, oracle: &BTreeSet<String>) -> TaskScore {
    let sr = trace.steps.len() as u32;

    let final_index = trace
        .answer_events
        .iter()
        .position(|e| e.kind == AnswerKind::Final);
    let ff = final_index.is_some();
    let acc = final_index.is_some_and(|i| match &trace.answer_events[i].value {
        AnswerValue::Number(n) => n == gold,
        _ => false,
    });
    let premt = final_index.is_some_and(|f| {
        trace.answer_events[..f]
            .iter()
            .any(|e| e.kind == AnswerKind::Provisional)
    });

    let coverage_step = earliest_coverage(trace, oracle);
    let sc = coverage_step.is_some();
    let er = coverage_step.map_or(0, |c| sr - c);

    let tot_tok: u64 = trace.steps.iter().map(|s| s.tokens_generated).sum();
    let tok_per_round = tot_tok as f64 / sr.max(1) as f64;

    TaskScore {
        acc,
        sr,
        dur_s: trace.total_duration_s,
        sc,
        er,
        ff,
        premt,
        tot_tok,
        tok_per_round,
        coverage_step,
    }
}

fn earliest_coverage(trace: &EpisodeTrace, oracle: &BTreeSet<String>) -> Option<u32> {
    if oracle.is_empty() {
        return Some(0);
    }
    let mut remaining: BTreeSet<&str> = oracle.iter().map(String::as_str).collect();
    for (i, step) in trace.steps.iter().enumerate() {
        for id in &step.returned_doc_ids {
            remaining.remove(id.as_str());
        }
        if remaining.is_empty() {
            return Some(i as u32 + 1);
        }
    }
    None
}

/// Fraction of episodes correct at each round budget `n` in `0..=max_n`.
///
/// An episode counts at budget `n` when its final answer is correct and it
/// either finished within `n` tool calls or had already collected every
/// relevant document within `n` tool calls. The curve is non-decreasing.
pub fn interaction_scaling(scores: &[TaskScore], max_n: u32) -> Vec<f64> {
    (0..=max_n)
        .map(|n| {
            if scores.is_empty() {
                return 0.0;
            }
            let correct = scores
                .iter()
                .filter(|s| {
                    s.acc && (s.sr <= n || s.coverage_step.is_some_and(|c| c <= n))
                })
                .count();
            correct as f64 / scores.len() as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::answer::AnswerEvent;
    use crate::episode::EpisodeStep;
    use serde_json::json;

    fn step(ids: &[&str], tokens: u64) -> EpisodeStep {
        EpisodeStep {
            tool_name: "search_information".to_string(),
            arguments: json!({"query": "q"}),
            returned_doc_ids: ids.iter().map(|s| s.to_string()).collect(),
            tokens_generated: tokens,
            duration_s: 0.5,
        }
    }

    fn final_event(text: &str) -> AnswerEvent {
        crate::answer::answer_events(text).pop().expect("final line")
    }

    fn gold(v: i64) -> Decimal {
        Decimal::from_int(v)
    }

    #[test]
    fn excess_counts_calls_after_coverage() {
        let oracle: BTreeSet<String> =
            ["a", "b"].iter().map(|s| s.to_string()).collect();
        let trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![
                step(&["a"], 10),
                step(&[], 10),
                step(&["x"], 10),
                step(&["b"], 10),
                step(&[], 10),
                step(&["a"], 10),
                step(&[], 10),
            ],
            answer_events: vec![final_event("#### 46")],
            total_duration_s: 3.5,
            failure: None,
        };
        let s = score(&trace, &gold(46), &oracle);
        assert_eq!(s.sr, 7);
        assert_eq!(s.coverage_step, Some(4));
        assert!(s.sc);
        assert_eq!(s.er, 3);
        assert!(s.acc);
        assert!(s.ff);
        assert!(!s.premt);
        assert_eq!(s.tot_tok, 70);
        assert!((s.tok_per_round - 10.0).abs() < 1e-12);
    }

    #[test]
    fn no_coverage_means_no_excess() {
        let oracle: BTreeSet<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![step(&["a"], 5), step(&["a"], 5)],
            answer_events: vec![],
            total_duration_s: 1.0,
            failure: None,
        };
        let s = score(&trace, &gold(1), &oracle);
        assert!(!s.sc);
        assert_eq!(s.er, 0);
        assert!(!s.acc);
        assert!(!s.ff);
    }

    #[test]
    fn wrong_and_unknown_finals_still_follow_format() {
        let oracle = BTreeSet::new();
        let mut trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![],
            answer_events: vec![final_event("#### 45")],
            total_duration_s: 0.0,
            failure: None,
        };
        let s = score(&trace, &gold(46), &oracle);
        assert!(!s.acc);
        assert!(s.ff);

        trace.answer_events = vec![final_event("#### I don't know")];
        let s = score(&trace, &gold(46), &oracle);
        assert!(!s.acc);
        assert!(s.ff);
    }

    #[test]
    fn premature_requires_a_provisional_before_the_final() {
        let oracle = BTreeSet::new();
        let events = crate::answer::answer_events("**** 31\nmore work\n#### 46");
        let trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![],
            answer_events: events,
            total_duration_s: 0.0,
            failure: None,
        };
        assert!(score(&trace, &gold(46), &oracle).premt);
    }

    #[test]
    fn zero_rounds_divide_safely() {
        let trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![],
            answer_events: vec![final_event("#### 46")],
            total_duration_s: 0.0,
            failure: None,
        };
        let s = score(&trace, &gold(46), &BTreeSet::new());
        assert_eq!(s.sr, 0);
        assert_eq!(s.tot_tok, 0);
        assert_eq!(s.tok_per_round, 0.0);
    }

    #[test]
    fn scaling_curve_gates_on_rounds_or_coverage() {
        // Correct answer after 7 calls, coverage at 4: counted from n = 4 on.
        let oracle: BTreeSet<String> = ["a"].iter().map(|s| s.to_string()).collect();
        let trace = EpisodeTrace {
            task_id: "t".to_string(),
            steps: vec![
                step(&[], 1),
                step(&[], 1),
                step(&[], 1),
                step(&["a"], 1),
                step(&[], 1),
                step(&[], 1),
                step(&[], 1),
            ],
            answer_events: vec![final_event("#### 46")],
            total_duration_s: 0.0,
            failure: None,
        };
        let s = score(&trace, &gold(46), &oracle);
        let curve = interaction_scaling(std::slice::from_ref(&s), 8);
        assert_eq!(curve[3], 0.0);
        assert_eq!(curve[4], 1.0);
        assert_eq!(curve[8], 1.0);
        for w in curve.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }
}
