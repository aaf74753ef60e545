//! Aggregated path and span statistics, plus the analysis report shape.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::ReasoningGraphModel;
use crate::path::{ratios, Ratios, ReasoningPath};
use crate::GraphError;

/// Means over one group of traces. Ratio columns are macro-averages
/// (mean of per-trace proportions); traces with empty paths contribute to
/// `traces` and `v_mean` but not to the ratio means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphBucket {
    pub traces: usize,
    /// Mean number of distinct nodes per trace.
    pub v_mean: f64,
    /// Fraction of traces with at least one revisit step.
    pub has_rvst: f64,
    pub explore: f64,
    pub exploit: f64,
    pub revisit: f64,
}

impl GraphBucket {
    fn from_paths(paths: &[&ReasoningPath]) -> Self {
        let traces = paths.len();
        if traces == 0 {
            return Self {
                traces: 0,
                v_mean: 0.0,
                has_rvst: 0.0,
                explore: 0.0,
                exploit: 0.0,
                revisit: 0.0,
            };
        }
        let v_mean =
            paths.iter().map(|p| p.unique_nodes() as f64).sum::<f64>() / traces as f64;
        let has_rvst =
            paths.iter().filter(|p| p.has_revisit()).count() as f64 / traces as f64;
        let per_trace: Vec<Ratios> =
            paths.iter().filter_map(|p| ratios(&p.step_kinds)).collect();
        let m = per_trace.len().max(1) as f64;
        Self {
            traces,
            v_mean,
            has_rvst,
            explore: per_trace.iter().map(|r| r.explore).sum::<f64>() / m,
            exploit: per_trace.iter().map(|r| r.exploit).sum::<f64>() / m,
            revisit: per_trace.iter().map(|r| r.revisit).sum::<f64>() / m,
        }
    }
}

/// Path statistics over all traces plus the V = 2 and V ≥ 3 buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceGraphStats {
    pub overall: GraphBucket,
    pub bucket_v2: GraphBucket,
    pub bucket_v3_plus: GraphBucket,
}

pub fn trace_graph_stats(paths: &[ReasoningPath]) -> TraceGraphStats {
    let all: Vec<&ReasoningPath> = paths.iter().collect();
    let v2: Vec<&ReasoningPath> = paths.iter().filter(|p| p.unique_nodes() == 2).collect();
    let v3: Vec<&ReasoningPath> = paths.iter().filter(|p| p.unique_nodes() >= 3).collect();
    TraceGraphStats {
        overall: GraphBucket::from_paths(&all),
        bucket_v2: GraphBucket::from_paths(&v2),
        bucket_v3_plus: GraphBucket::from_paths(&v3),
    }
}

/// Mean, population standard deviation, and order statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean: 0.0,
                std: 0.0,
                min: 0.0,
                max: 0.0,
                median: 0.0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        let median = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2]) / 2.0
        };
        Self {
            mean,
            std: var.sqrt(),
            min: sorted[0],
            max: *sorted.last().unwrap(),
            median,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanStats {
    pub tasks: usize,
    /// Distinct clusters covered by each task's documents.
    pub span: Summary,
    pub docs_per_problem: Summary,
}

/// Span statistics over tasks, given each task's document ids. Every
/// document must be assigned in the model.
pub fn span_stats(
    task_docs: &BTreeMap<String, Vec<String>>,
    model: &ReasoningGraphModel,
) -> Result<SpanStats, GraphError> {
    let mut spans = Vec::with_capacity(task_docs.len());
    let mut doc_counts = Vec::with_capacity(task_docs.len());
    for doc_ids in task_docs.values() {
        let mut clusters = BTreeSet::new();
        for doc_id in doc_ids {
            let cluster = model.assignment.get(doc_id).ok_or_else(|| {
                GraphError::UnassignedDocument {
                    doc_id: doc_id.clone(),
                }
            })?;
            clusters.insert(*cluster);
        }
        spans.push(clusters.len() as f64);
        doc_counts.push(doc_ids.len() as f64);
    }
    Ok(SpanStats {
        tasks: task_docs.len(),
        span: Summary::from_values(&spans),
        docs_per_problem: Summary::from_values(&doc_counts),
    })
}

/// One analyzed trace in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTraceRow {
    pub task_id: String,
    /// Path length (retrieval-bearing tool calls).
    pub t: usize,
    pub v: usize,
    pub has_revisit: bool,
    pub ratios: Option<Ratios>,
}

/// Version stamped on every serialized [`GraphReport`].
pub const GRAPH_SCHEMA_VERSION: u32 = 1;

/// Full output of a graph analysis run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub schema_version: u32,
    pub k: usize,
    pub seed: u64,
    pub stats: TraceGraphStats,
    pub span: SpanStats,
    pub per_trace: Vec<PerTraceRow>,
}

impl GraphReport {
    pub fn new(
        k: usize,
        seed: u64,
        paths: &[ReasoningPath],
        span: SpanStats,
    ) -> Self {
        let per_trace = paths
            .iter()
            .map(|p| PerTraceRow {
                task_id: p.task_id.clone(),
                t: p.nodes.len(),
                v: p.unique_nodes(),
                has_revisit: p.has_revisit(),
                ratios: ratios(&p.step_kinds),
            })
            .collect();
        Self {
            schema_version: GRAPH_SCHEMA_VERSION,
            k,
            seed,
            stats: trace_graph_stats(paths),
            span,
            per_trace,
        }
    }
}
