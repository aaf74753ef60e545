//! Tool-call paths over the cluster graph and their step labels.

use serde::{Deserialize, Serialize};
use store::Embedder;

use crate::model::ReasoningGraphModel;
use crate::GraphError;

/// One tool call as the analyzer sees it: the tool's name and, for
/// search-semantics tools, the query text that was embedded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCall<'a> {
    pub tool: &'a str,
    pub query: Option<&'a str>,
}

impl<'a> TraceCall<'a> {
    pub fn new(tool: &'a str, query: Option<&'a str>) -> Self {
        Self { tool, query }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Explore,
    Exploit,
    Revisit,
}

/// A classified walk over the graph: one node per retrieval-bearing tool
/// call. `nodes` and `step_kinds` always have equal length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReasoningPath {
    pub task_id: String,
    pub nodes: Vec<usize>,
    pub step_kinds: Vec<StepKind>,
}

impl ReasoningPath {
    pub fn from_nodes(task_id: impl Into<String>, nodes: Vec<usize>) -> Self {
        let step_kinds = classify_steps(&nodes);
        Self {
            task_id: task_id.into(),
            nodes,
            step_kinds,
        }
    }

    /// Number of distinct nodes visited.
    pub fn unique_nodes(&self) -> usize {
        let mut sorted = self.nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len()
    }

    pub fn has_revisit(&self) -> bool {
        self.step_kinds.contains(&StepKind::Revisit)
    }
}

/// Map a trace's tool calls to graph nodes. Search-semantics calls
/// (`search_information`, `explore`, `revisit`) embed their query and take
/// the nearest centroid (ties to the lowest index); `next_page` inherits
/// the previous node; `think_tool` carries no retrieval and is skipped.
pub fn map_path(
    calls: &[TraceCall],
    model: &ReasoningGraphModel,
    embedder: &dyn Embedder,
) -> Result<Vec<usize>, GraphError> {
    let mut nodes = Vec::new();
    for (index, call) in calls.iter().enumerate() {
        match call.tool {
            "search_information" | "explore" | "revisit" => {
                let query = call.query.ok_or_else(|| GraphError::MissingQuery {
                    tool: call.tool.to_string(),
                    index,
                })?;
                let embedded = embedder.embed(query);
                if embedded.len() != model.dimension() {
                    return Err(GraphError::DimensionMismatch {
                        index,
                        found: embedded.len(),
                        expected: model.dimension(),
                    });
                }
                let q: Vec<f64> = embedded.iter().map(|&x| x as f64).collect();
                nodes.push(model.nearest_cluster(&q));
            }
            "next_page" => {
                let last = *nodes
                    .last()
                    .ok_or(GraphError::NextPageFirst { index })?;
                nodes.push(last);
            }
            "think_tool" => {}
            other => {
                return Err(GraphError::UnknownTool {
                    tool: other.to_string(),
                    index,
                })
            }
        }
    }
    Ok(nodes)
}

/// Label each step: a node never visited before is an exploration (the
/// first step always is), repeating the immediately previous node is an
/// exploitation, and returning to an earlier node after leaving it is a
/// revisit.
pub fn classify_steps(nodes: &[usize]) -> Vec<StepKind> {
    let mut seen = std::collections::BTreeSet::new();
    let mut kinds = Vec::with_capacity(nodes.len());
    for (t, &node) in nodes.iter().enumerate() {
        let kind = if !seen.contains(&node) {
            StepKind::Explore
        } else if t > 0 && nodes[t - 1] == node {
            StepKind::Exploit
        } else {
            StepKind::Revisit
        };
        seen.insert(node);
        kinds.push(kind);
    }
    kinds
}

/// Proportions of each step kind; the three sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub explore: f64,
    pub exploit: f64,
    pub revisit: f64,
}

/// `None` for an empty path: the proportions are undefined, not zero.
pub fn ratios(kinds: &[StepKind]) -> Option<Ratios> {
    if kinds.is_empty() {
        return None;
    }
    let t = kinds.len() as f64;
    let count = |want: StepKind| kinds.iter().filter(|&&k| k == want).count() as f64;
    Some(Ratios {
        explore: count(StepKind::Explore) / t,
        exploit: count(StepKind::Exploit) / t,
        revisit: count(StepKind::Revisit) / t,
    })
}
