//! The build manifest: seeds, counts, and drop reasons for one database.
//!
//! Deliberately free of wall-clock fields and absolute paths so that two
//! builds from the same inputs and seeds produce byte-identical manifests.

use std::path::Path;

use genpipe::{DropRecord, PipelineStats};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSeeds {
    /// Pipeline master seed (anonymization sampling and the mock model).
    pub pipeline: u64,
    /// Split subsampling seed.
    pub split: u64,
    /// Seed handed to the text model backend.
    pub model: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderInfo {
    pub kind: String,
    pub dimension: usize,
}

/// Counts after the split was applied, alongside the pipeline totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub tasks: usize,
    pub documents: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub schema_version: u32,
    pub split: String,
    pub seeds: ManifestSeeds,
    pub model: String,
    pub embedder: EmbedderInfo,
    pub pipeline: PipelineStats,
    pub split_counts: SplitCounts,
    /// Problems dropped before task assembly, with the stage that dropped
    /// them and why.
    pub drops: Vec<ManifestDrop>,
    /// Tasks assembled but rejected by the solvability filter.
    pub rejected_task_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestDrop {
    pub problem_id: String,
    pub stage: String,
    pub reason: String,
}

impl From<&DropRecord> for ManifestDrop {
    fn from(record: &DropRecord) -> Self {
        Self {
            problem_id: record.problem_id.clone(),
            stage: record.stage.clone(),
            reason: record.reason.clone(),
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &BuildManifest) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(manifest).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<BuildManifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let manifest: BuildManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: manifest schema_version {} (expected {MANIFEST_SCHEMA_VERSION})",
            path.display(),
            manifest.schema_version
        )));
    }
    Ok(manifest)
}
