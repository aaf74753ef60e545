//! `report`: merge one metrics report and one graph report into the final
//! CSV tables — headline metrics, graph metrics, span summary, and the
//! accuracy-at-n curve.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use graphlab::{GraphReport, Summary, GRAPH_SCHEMA_VERSION};
use harness::{MetricsReport, REPORT_SCHEMA_VERSION};

use crate::config::FileConfig;
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct ReportArgs {
    /// Metrics report JSON produced by `eval`.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Graph report JSON produced by `analyze`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Directory receiving the merged CSV tables [default: report].
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ReportSummary {
    pub headline_csv: PathBuf,
    pub graph_csv: PathBuf,
    pub span_csv: PathBuf,
    pub accuracy_csv: PathBuf,
}

pub fn cmd_report(args: &ReportArgs, file: &FileConfig) -> Result<ReportSummary, CliError> {
    let metrics_path = args
        .metrics
        .clone()
        .or_else(|| file.metrics.clone())
        .ok_or_else(|| CliError::Usage("report needs --metrics".into()))?;
    let graph_path = args
        .graph
        .clone()
        .or_else(|| file.graph.clone())
        .ok_or_else(|| CliError::Usage("report needs --graph".into()))?;
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("report"));

    let metrics: MetricsReport = read_json(&metrics_path)?;
    if metrics.schema_version != REPORT_SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: metrics schema_version {} (expected {REPORT_SCHEMA_VERSION})",
            metrics_path.display(),
            metrics.schema_version
        )));
    }
    let graph: GraphReport = read_json(&graph_path)?;
    if graph.schema_version != GRAPH_SCHEMA_VERSION {
        return Err(CliError::Data(format!(
            "{}: graph schema_version {} (expected {GRAPH_SCHEMA_VERSION})",
            graph_path.display(),
            graph.schema_version
        )));
    }

    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;
    let headline_csv = out_dir.join("headline_metrics.csv");
    write_headline_csv(&metrics, &headline_csv)?;
    let graph_csv = out_dir.join("graph_metrics.csv");
    write_graph_csv(&graph, &graph_csv)?;
    let span_csv = out_dir.join("span.csv");
    write_span_csv(&graph, &span_csv)?;
    let accuracy_csv = out_dir.join("accuracy_at_n.csv");
    write_accuracy_csv(&metrics, &accuracy_csv)?;

    log::info!(
        "merged {} and {} into {}",
        metrics_path.display(),
        graph_path.display(),
        out_dir.display()
    );
    Ok(ReportSummary {
        headline_csv,
        graph_csv,
        span_csv,
        accuracy_csv,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    if !path.exists() {
        return Err(CliError::io(path, "no such file"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn csv_file(path: &Path, schema_version: u32) -> Result<csv::Writer<std::fs::File>, CliError> {
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "# schema_version: {schema_version}").map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// One row in headline column order: Acc, SR, Dur_s, SC, ER, FF, PremT,
/// Tot_Tok, Tok/Round, prefixed by the run identity.
fn write_headline_csv(metrics: &MetricsReport, path: &Path) -> Result<(), CliError> {
    let mut writer = csv_file(path, metrics.schema_version)?;
    writer
        .write_record([
            "setting",
            "agent",
            "episodes",
            "acc",
            "sr",
            "dur_s",
            "sc",
            "er",
            "ff",
            "premt",
            "tot_tok",
            "tok_per_round",
        ])
        .map_err(|e| CliError::io(path, e))?;
    let a = &metrics.aggregate;
    writer
        .write_record([
            metrics.setting.clone(),
            metrics.agent.clone(),
            metrics.per_task.len().to_string(),
            format!("{:.6}", a.acc),
            format!("{:.6}", a.sr),
            format!("{:.6}", a.dur_s),
            format!("{:.6}", a.sc),
            format!("{:.6}", a.er),
            format!("{:.6}", a.ff),
            format!("{:.6}", a.premt),
            format!("{:.6}", a.tot_tok),
            format!("{:.6}", a.tok_per_round),
        ])
        .map_err(|e| CliError::io(path, e))?;
    writer.flush().map_err(|e| CliError::io(path, e))
}

/// One row per bucket in the V / hasRvst / Expl / Expt / Rvst column order.
pub(crate) fn write_graph_csv(report: &GraphReport, path: &Path) -> Result<(), CliError> {
    let mut writer = csv_file(path, report.schema_version)?;
    writer
        .write_record(["bucket", "traces", "v", "has_rvst", "expl", "expt", "rvst"])
        .map_err(|e| CliError::io(path, e))?;
    for (name, bucket) in [
        ("all", &report.stats.overall),
        ("v2", &report.stats.bucket_v2),
        ("v3plus", &report.stats.bucket_v3_plus),
    ] {
        writer
            .write_record([
                name.to_string(),
                bucket.traces.to_string(),
                format!("{:.6}", bucket.v_mean),
                format!("{:.6}", bucket.has_rvst),
                format!("{:.6}", bucket.explore),
                format!("{:.6}", bucket.exploit),
                format!("{:.6}", bucket.revisit),
            ])
            .map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

fn write_span_csv(report: &GraphReport, path: &Path) -> Result<(), CliError> {
    let mut writer = csv_file(path, report.schema_version)?;
    writer
        .write_record(["measure", "tasks", "mean", "std", "min", "max", "median"])
        .map_err(|e| CliError::io(path, e))?;
    let rows: [(&str, &Summary); 2] = [
        ("span", &report.span.span),
        ("docs_per_problem", &report.span.docs_per_problem),
    ];
    for (name, summary) in rows {
        writer
            .write_record([
                name.to_string(),
                report.span.tasks.to_string(),
                format!("{:.6}", summary.mean),
                format!("{:.6}", summary.std),
                format!("{:.6}", summary.min),
                format!("{:.6}", summary.max),
                format!("{:.6}", summary.median),
            ])
            .map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}

fn write_accuracy_csv(metrics: &MetricsReport, path: &Path) -> Result<(), CliError> {
    let mut writer = csv_file(path, metrics.schema_version)?;
    writer
        .write_record(["n", "accuracy"])
        .map_err(|e| CliError::io(path, e))?;
    for (n, accuracy) in metrics.accuracy_at_n.iter().enumerate() {
        writer
            .write_record([n.to_string(), format!("{accuracy:.6}")])
            .map_err(|e| CliError::io(path, e))?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}
