//! Problem records and JSONL corpus i/o.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CorpusError;

/// Unique identifier of a problem within a corpus.
pub type ProblemId = String;

/// A single word problem.
///
/// `entity_names` holds the names of the entities the problem is about (the
/// people and organizations that take part in the story). `is_generic` marks
/// problems whose protagonist is a generic role ("a farmer", "a store") that
/// still needs a concrete name assigned before sharding; named problems keep
/// the names they came with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Problem {
    pub id: ProblemId,
    pub text: String,
    #[serde(default)]
    pub entity_names: BTreeSet<String>,
    #[serde(default)]
    pub is_generic: bool,
    /// Gold final answer, when the source corpus provides one. Kept as a
    /// string so exact decimal comparison stays lossless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
}

impl Problem {
    /// Validates the invariants a preprocessed problem must satisfy.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::InvalidProblem {
                id: self.id.clone(),
                reason: "empty id".into(),
            });
        }
        if self.text.trim().is_empty() {
            return Err(CorpusError::InvalidProblem {
                id: self.id.clone(),
                reason: "empty text".into(),
            });
        }
        Ok(())
    }
}

/// Reads a JSONL corpus (one problem object per line, blank lines skipped).
///
/// Fails on the first malformed line (reported with its line number) or on a
/// duplicate problem id.
pub fn read_problems(path: &Path) -> Result<Vec<Problem>, CorpusError> {
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut problems = Vec::new();
    let mut seen: BTreeSet<ProblemId> = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let problem: Problem =
            serde_json::from_str(&line).map_err(|source| CorpusError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                source,
            })?;
        problem.validate()?;
        if !seen.insert(problem.id.clone()) {
            return Err(CorpusError::DuplicateId(problem.id));
        }
        problems.push(problem);
    }
    Ok(problems)
}

/// Writes problems as JSONL, one object per line, in the order given.
pub fn write_problems(path: &Path, problems: &[Problem]) -> Result<(), CorpusError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|source| {
        CorpusError::Io {
            path: path.display().to_string(),
            source,
        }
    })?);
    for problem in problems {
        let line = serde_json::to_string(problem).expect("problem serializes");
        writeln!(out, "{line}").map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    out.flush().map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(id: &str, names: &[&str]) -> Problem {
        Problem {
            id: id.into(),
            text: format!("problem {id}"),
            entity_names: names.iter().map(|s| s.to_string()).collect(),
            is_generic: false,
            answer: None,
        }
    }

    #[test]
    fn roundtrips_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        let problems = vec![
            problem("p1", &["Alice"]),
            Problem {
                answer: Some("42".into()),
                is_generic: true,
                ..problem("p2", &["Bob", "Alice"])
            },
        ];
        write_problems(&path, &problems).unwrap();
        let back = read_problems(&path).unwrap();
        assert_eq!(back, problems);
    }

    #[test]
    fn rejects_duplicate_ids() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        write_problems(&path, &[problem("p1", &["A"]), problem("p1", &["B"])]).unwrap();
        let err = read_problems(&path).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId(id) if id == "p1"));
    }

    #[test]
    fn reports_line_numbers_on_parse_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.jsonl");
        std::fs::write(&path, "{\"id\":\"p1\",\"text\":\"ok\"}\nnot json\n").unwrap();
        let err = read_problems(&path).unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn optional_fields_default() {
        let p: Problem = serde_json::from_str("{\"id\":\"x\",\"text\":\"t\"}").unwrap();
        assert!(p.entity_names.is_empty());
        assert!(!p.is_generic);
        assert!(p.answer.is_none());
    }
}
