//! `analyze`: cluster a database's document embeddings, map episode traces
//! onto the cluster graph, and emit the reasoning-graph report.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use graphlab::{
    kmeans, map_path, GraphReport, KmeansConfig, ReasoningPath, TraceCall,
};
use harness::EpisodeTrace;
use store::{load_index, HashedBowEmbedder, VectorIndex};

use crate::config::FileConfig;
use crate::eval::read_trace_files;
use crate::report::write_graph_csv;
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct AnalyzeArgs {
    /// Database file produced by `build`.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Directory of episode trace JSONs produced by `eval`.
    #[arg(long)]
    pub traces: Option<PathBuf>,
    /// Number of clusters; clamped to the document count [default: 250].
    #[arg(long)]
    pub k: Option<usize>,
    /// Clustering seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Graph report JSON path; a CSV twin lands next to it
    /// [default: graph_report.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct AnalyzeSummary {
    pub report_json: PathBuf,
    pub report_csv: PathBuf,
    pub centroids_path: PathBuf,
    pub traces: usize,
    pub k: usize,
}

pub fn cmd_analyze(args: &AnalyzeArgs, file: &FileConfig) -> Result<AnalyzeSummary, CliError> {
    let db = args
        .db
        .clone()
        .or_else(|| file.db.clone())
        .ok_or_else(|| CliError::Usage("analyze needs --db".into()))?;
    let traces_dir = args
        .traces
        .clone()
        .or_else(|| file.traces.clone())
        .ok_or_else(|| CliError::Usage("analyze needs --traces".into()))?;
    let k_requested = args.k.or(file.k).unwrap_or(250);
    if k_requested == 0 {
        return Err(CliError::Usage("--k must be positive".into()));
    }
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let out = args
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("graph_report.json"));

    if !db.exists() {
        return Err(CliError::io(&db, "no such file"));
    }
    let index = load_index(&db).map_err(|e| CliError::Data(format!("{}: {e}", db.display())))?;
    let traces = read_trace_files(&traces_dir)?;
    if traces.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no trace files to analyze",
            traces_dir.display()
        )));
    }

    let k = k_requested.min(index.len());
    if k < k_requested {
        log::warn!(
            "clamping K from {k_requested} to {k}: the database holds only {} documents",
            index.len()
        );
    }
    let (ids, vectors): (Vec<String>, Vec<Vec<f32>>) = index
        .entries()
        .iter()
        .map(|e| (e.doc_id.clone(), e.vector.clone()))
        .unzip();
    let model = kmeans(
        &ids,
        &vectors,
        &KmeansConfig {
            k,
            seed,
            ..KmeansConfig::default()
        },
    )
    .map_err(|e| CliError::stage("kmeans", e))?;

    let centroids_path = db.with_extension("centroids.json");
    model
        .save(&centroids_path)
        .map_err(|e| CliError::io(&centroids_path, e))?;

    let embedder = HashedBowEmbedder::new(index.dimension());
    let mut paths = Vec::with_capacity(traces.len());
    for trace in &traces {
        let nodes = map_path(&trace_calls(trace), &model, &embedder)
            .map_err(|e| CliError::Data(format!("trace {}: {e}", trace.task_id)))?;
        paths.push(ReasoningPath::from_nodes(trace.task_id.clone(), nodes));
    }

    let span = graphlab::span_stats(&docs_by_task(&index), &model)
        .map_err(|e| CliError::stage("analyze", e))?;
    let report = GraphReport::new(k, seed, &paths, span);

    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::io(&out, e))?;
    text.push('\n');
    std::fs::write(&out, text).map_err(|e| CliError::io(&out, e))?;
    let csv_path = out.with_extension("csv");
    write_graph_csv(&report, &csv_path)?;

    log::info!(
        "analyzed {} trace(s) over K={k}: mean V {:.2} -> {}",
        paths.len(),
        report.stats.overall.v_mean,
        out.display()
    );
    Ok(AnalyzeSummary {
        report_json: out,
        report_csv: csv_path,
        centroids_path,
        traces: traces.len(),
        k,
    })
}

/// Tool calls of a trace in the shape the path mapper wants: the tool name
/// plus its query argument, when it has one.
pub fn trace_calls(trace: &EpisodeTrace) -> Vec<TraceCall<'_>> {
    trace
        .steps
        .iter()
        .map(|step| {
            let query = step
                .arguments
                .get("query")
                .or_else(|| step.arguments.get("new_query"))
                .and_then(|v| v.as_str());
            TraceCall::new(&step.tool_name, query)
        })
        .collect()
}

fn docs_by_task(index: &VectorIndex) -> BTreeMap<String, Vec<String>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for entry in index.entries() {
        map.entry(entry.document.source.0.clone())
            .or_default()
            .push(entry.doc_id.clone());
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{cmd_build, BuildArgs};
    use crate::eval::{cmd_eval, EvalArgs};
    use genpipe::synth::{generate, SynthConfig};
    use std::path::Path;

    fn built_and_evaled(dir: &Path) -> (PathBuf, PathBuf) {
        let problems = generate(&SynthConfig {
            n_problems: 8,
            ..SynthConfig::default()
        });
        let corpus_path = dir.join("problems.jsonl");
        corpus::write_problems(&corpus_path, &problems).unwrap();
        let db = cmd_build(
            &BuildArgs {
                corpus: Some(corpus_path),
                out: Some(dir.join("env.sgdb")),
                ..BuildArgs::default()
            },
            &FileConfig::default(),
        )
        .unwrap()
        .db_path;
        let summary = cmd_eval(
            &EvalArgs {
                db: Some(db.clone()),
                seeds: Some("1".into()),
                out: Some(dir.join("report.json")),
                ..EvalArgs::default()
            },
            &FileConfig::default(),
        )
        .unwrap();
        (db, summary.traces_dir)
    }

    #[test]
    fn analyze_end_to_end_clamps_k_and_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let (db, traces_dir) = built_and_evaled(dir.path());
        let summary = cmd_analyze(
            &AnalyzeArgs {
                db: Some(db.clone()),
                traces: Some(traces_dir),
                out: Some(dir.path().join("graph_report.json")),
                ..AnalyzeArgs::default()
            },
            &FileConfig::default(),
        )
        .unwrap();
        assert!(summary.k <= store::load_index(&db).unwrap().len());
        assert!(summary.report_json.exists());
        assert!(summary.report_csv.exists());
        assert!(summary.centroids_path.exists());
        let model = graphlab::ReasoningGraphModel::load(&summary.centroids_path).unwrap();
        assert_eq!(model.k, summary.k);
        let text = std::fs::read_to_string(&summary.report_csv).unwrap();
        assert!(text.starts_with("# schema_version: 1"));
        assert!(text.contains("v3plus"));
    }

    #[test]
    fn missing_traces_dir_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let (db, _) = built_and_evaled(dir.path());
        let err = cmd_analyze(
            &AnalyzeArgs {
                db: Some(db),
                traces: Some(dir.path().join("nowhere")),
                ..AnalyzeArgs::default()
            },
            &FileConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn empty_traces_dir_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let (db, _) = built_and_evaled(dir.path());
        let empty = dir.path().join("empty");
        std::fs::create_dir_all(&empty).unwrap();
        let err = cmd_analyze(
            &AnalyzeArgs {
                db: Some(db),
                traces: Some(empty),
                ..AnalyzeArgs::default()
            },
            &FileConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn trace_calls_pull_query_and_new_query() {
        let trace = EpisodeTrace {
            task_id: "p0".into(),
            steps: vec![
                harness::EpisodeStep {
                    tool_name: "search_information".into(),
                    arguments: serde_json::json!({"query": "apples"}),
                    returned_doc_ids: vec![],
                    tokens_generated: 0,
                    duration_s: 0.0,
                },
                harness::EpisodeStep {
                    tool_name: "revisit".into(),
                    arguments: serde_json::json!({
                        "revisit_topic": "apples",
                        "reasoning": "double-check",
                        "new_query": "apples recount"
                    }),
                    returned_doc_ids: vec![],
                    tokens_generated: 0,
                    duration_s: 0.0,
                },
                harness::EpisodeStep {
                    tool_name: "next_page".into(),
                    arguments: serde_json::json!({}),
                    returned_doc_ids: vec![],
                    tokens_generated: 0,
                    duration_s: 0.0,
                },
            ],
            answer_events: vec![],
            total_duration_s: 0.0,
            failure: None,
        };
        let calls = trace_calls(&trace);
        assert_eq!(calls[0].query, Some("apples"));
        assert_eq!(calls[1].query, Some("apples recount"));
        assert_eq!(calls[2].query, None);
    }
}
