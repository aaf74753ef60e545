//! Report assembly and serialization (JSON and CSV).

use std::fs::File;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::score::{interaction_scaling, TaskScore};
use crate::HarnessError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRow {
    pub seed: u64,
    pub task_id: String,
    #[serde(flatten)]
    pub score: TaskScore,
}

/// Column means over all rows, in report column order. Boolean metrics
/// become rates in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub acc: f64,
    pub sr: f64,
    pub dur_s: f64,
    pub sc: f64,
    pub er: f64,
    pub ff: f64,
    pub premt: f64,
    pub tot_tok: f64,
    pub tok_per_round: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub setting: String,
    pub agent: String,
    pub seeds: Vec<u64>,
    pub per_task: Vec<TaskRow>,
    pub aggregate: AggregateRow,
    /// Fraction correct at each round budget `n`, indexed `0..=max_rounds`.
    pub accuracy_at_n: Vec<f64>,
}

impl MetricsReport {
    pub fn from_rows(
        setting: &str,
        agent: &str,
        seeds: &[u64],
        per_task: Vec<TaskRow>,
        max_n: u32,
    ) -> Self {
        let scores: Vec<&TaskScore> = per_task.iter().map(|r| &r.score).collect();
        let aggregate = aggregate(&scores);
        let owned: Vec<TaskScore> = scores.iter().map(|s| (*s).clone()).collect();
        let accuracy_at_n = interaction_scaling(&owned, max_n);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            setting: setting.to_string(),
            agent: agent.to_string(),
            seeds: seeds.to_vec(),
            per_task,
            aggregate,
            accuracy_at_n,
        }
    }
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    values.sum::<f64>() / n as f64
}

fn aggregate(scores: &[&TaskScore]) -> AggregateRow {
    let n = scores.len();
    AggregateRow {
        acc: mean(scores.iter().map(|s| s.acc as u8 as f64), n),
        sr: mean(scores.iter().map(|s| s.sr as f64), n),
        dur_s: mean(scores.iter().map(|s| s.dur_s), n),
        sc: mean(scores.iter().map(|s| s.sc as u8 as f64), n),
        er: mean(scores.iter().map(|s| s.er as f64), n),
        ff: mean(scores.iter().map(|s| s.ff as u8 as f64), n),
        premt: mean(scores.iter().map(|s| s.premt as u8 as f64), n),
        tot_tok: mean(scores.iter().map(|s| s.tot_tok as f64), n),
        tok_per_round: mean(scores.iter().map(|s| s.tok_per_round), n),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write the per-task table plus a trailing mean row as CSV. The first
/// line is a `#`-prefixed schema comment; columns follow report order.
pub fn write_csv(report: &MetricsReport, path: &Path) -> Result<(), HarnessError> {
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    writeln!(file, "# schema_version: {}", report.schema_version).map_err(|e| io_err(path, e))?;

    let mut writer = csv::Writer::from_writer(file);
    writer.write_record([
        "seed",
        "task_id",
        "acc",
        "sr",
        "dur_s",
        "sc",
        "er",
        "ff",
        "premt",
        "tot_tok",
        "tok_per_round",
    ])?;
    for row in &report.per_task {
        let s = &row.score;
        writer.write_record([
            row.seed.to_string(),
            row.task_id.clone(),
            (s.acc as u8).to_string(),
            s.sr.to_string(),
            format_float(s.dur_s),
            (s.sc as u8).to_string(),
            s.er.to_string(),
            (s.ff as u8).to_string(),
            (s.premt as u8).to_string(),
            s.tot_tok.to_string(),
            format_float(s.tok_per_round),
        ])?;
    }
    let a = &report.aggregate;
    writer.write_record([
        String::new(),
        "mean".to_string(),
        format_float(a.acc),
        format_float(a.sr),
        format_float(a.dur_s),
        format_float(a.sc),
        format_float(a.er),
        format_float(a.ff),
        format_float(a.premt),
        format_float(a.tot_tok),
        format_float(a.tok_per_round),
    ])?;
    writer.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

fn format_float(v: f64) -> String {
    format!("{v:.6}")
}

pub fn write_json(report: &MetricsReport, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    serde_json::to_writer_pretty(file, report)?;
    Ok(())
}
