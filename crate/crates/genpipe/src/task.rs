//! Tasks and documents — the pipeline's output types.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use corpus::Timestamp;
use serde::{Deserialize, Serialize};

use crate::numeric::Decimal;
use crate::GenError;

/// A search-based reasoning task: a question whose supporting facts live in
/// documents, one per premise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub source_problem_id: String,
    pub question: String,
    pub premises: Vec<String>,
    pub gold_answer: Decimal,
    pub timestamp: Timestamp,
}

impl Task {
    /// Ids of this task's documents can be recovered through
    /// [`Document::source`]; the task itself stores none.
    pub fn premise_count(&self) -> usize {
        self.premises.len()
    }
}

/// Sidecar metadata attached to every document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMetadata {
    pub timestamp: Timestamp,
    pub names: Vec<String>,
    pub doc_type: String,
}

/// A single searchable document realizing exactly one premise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub content: String,
    pub metadata: DocMetadata,
    /// (problem id, premise index) this document was generated from.
    pub source: (String, usize),
    pub anonymized: bool,
}

/// Reads tasks from JSONL.
pub fn read_tasks(path: &Path) -> Result<Vec<Task>, GenError> {
    read_jsonl(path)
}

/// Writes tasks as JSONL in the order given.
pub fn write_tasks(path: &Path, tasks: &[Task]) -> Result<(), GenError> {
    write_jsonl(path, tasks)
}

/// Reads documents from JSONL.
pub fn read_documents(path: &Path) -> Result<Vec<Document>, GenError> {
    read_jsonl(path)
}

/// Writes documents as JSONL in the order given.
pub fn write_documents(path: &Path, documents: &[Document]) -> Result<(), GenError> {
    write_jsonl(path, documents)
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, GenError> {
    let file = std::fs::File::open(path).map_err(|source| GenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| GenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|source| GenError::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                source,
            })?,
        );
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), GenError> {
    let io_err = |source| GenError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    for item in items {
        let line = serde_json::to_string(item).expect("serializable");
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}
