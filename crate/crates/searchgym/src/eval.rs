//! `eval`: run an agent over every task of a database, once per seed,
//! writing one trace JSON per episode plus the metrics report (JSON + CSV).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use genpipe::{read_documents, read_tasks, Document, MockModel, Task};
use harness::{
    run_eval, write_csv, write_json, AgentAdapter, EvalConfig, EvalSetting, ModelAgent,
    OracleAgent, ScoredEpisode,
};
use toolsrv::{HttpTransport, LocalTransport, ToolTransport};

use crate::build::sidecar_paths;
use crate::config::FileConfig;
use crate::serve::load_engine;
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct EvalArgs {
    /// Database file produced by `build`.
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Agent to run: oracle, mock, mock:<seed>, or remote [default: oracle].
    #[arg(long)]
    pub agent: Option<String>,
    /// zeroshot|fewshot|cot|think|revisit|explore|both [default: zeroshot].
    #[arg(long)]
    pub setting: Option<String>,
    /// Either a count (`3` runs seeds 0,1,2) or an explicit list (`0,4,9`)
    /// [default: 3].
    #[arg(long)]
    pub seeds: Option<String>,
    /// Metrics report JSON path; a CSV twin lands next to it
    /// [default: report.json].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one trace JSON per episode
    /// [default: <out>.traces].
    #[arg(long)]
    pub traces_dir: Option<PathBuf>,
    /// Client-side round budget per episode [default: 50].
    #[arg(long)]
    pub max_rounds: Option<u32>,
    /// Worker threads; 0 = one per core.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Base URL of a running `serve` instance; omitted = in-process engine.
    #[arg(long)]
    pub server: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvalSummary {
    pub report_json: PathBuf,
    pub report_csv: PathBuf,
    pub traces_dir: PathBuf,
    pub episodes: usize,
    pub accuracy: f64,
    pub search_complete: f64,
    pub format_followed: f64,
}

/// `--seeds` grammar: a bare integer is a count (`3` → 0,1,2); a
/// comma-separated list is taken verbatim.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::Usage("--seeds must not be empty".into()));
    }
    if !text.contains(',') {
        if let Ok(count) = text.parse::<u64>() {
            if count == 0 {
                return Err(CliError::Usage("--seeds 0 selects no runs".into()));
            }
            return Ok((0..count).collect());
        }
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|e| CliError::Usage(format!("--seeds `{part}`: {e}")))
        })
        .collect()
}

enum AgentSpec {
    Oracle,
    Mock { seed: u64 },
    Remote,
}

impl AgentSpec {
    fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "oracle" => Ok(AgentSpec::Oracle),
            "mock" => Ok(AgentSpec::Mock { seed: 0 }),
            "remote" => Ok(AgentSpec::Remote),
            other => match other.strip_prefix("mock:") {
                Some(seed) => Ok(AgentSpec::Mock {
                    seed: seed.parse().map_err(|e| {
                        CliError::Usage(format!("--agent mock:<seed>: {e}"))
                    })?,
                }),
                None => Err(CliError::Usage(format!(
                    "unknown agent `{other}` (oracle | mock[:<seed>] | remote)"
                ))),
            },
        }
    }
}

pub fn cmd_eval(args: &EvalArgs, file: &FileConfig) -> Result<EvalSummary, CliError> {
    let db = args
        .db
        .clone()
        .or_else(|| file.db.clone())
        .ok_or_else(|| CliError::Usage("eval needs --db".into()))?;
    let setting: EvalSetting = args
        .setting
        .clone()
        .or_else(|| file.setting.clone())
        .unwrap_or_else(|| "zeroshot".into())
        .parse()
        .map_err(CliError::Usage)?;
    let agent_text = args
        .agent
        .clone()
        .or_else(|| file.agent.clone())
        .unwrap_or_else(|| "oracle".into());
    let spec = AgentSpec::parse(&agent_text)?;
    let seeds = parse_seeds(
        &args
            .seeds
            .clone()
            .or_else(|| file.seeds.clone())
            .unwrap_or_else(|| "3".into()),
    )?;
    let out = args
        .out
        .clone()
        .or_else(|| file.out.clone())
        .unwrap_or_else(|| PathBuf::from("report.json"));
    let traces_dir = args
        .traces_dir
        .clone()
        .or_else(|| file.traces.clone())
        .unwrap_or_else(|| out.with_extension("traces"));
    let max_rounds = args.max_rounds.or(file.max_rounds).unwrap_or(50);
    let workers = args.workers.or(file.workers).unwrap_or(0);

    let (tasks_path, docs_path, _) = sidecar_paths(&db);
    for required in [&db, &tasks_path, &docs_path] {
        if !required.exists() {
            return Err(CliError::io(required, "no such file"));
        }
    }
    let tasks = read_tasks(&tasks_path).map_err(|e| CliError::Data(e.to_string()))?;
    let documents = read_documents(&docs_path).map_err(|e| CliError::Data(e.to_string()))?;
    if tasks.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no tasks to evaluate",
            tasks_path.display()
        )));
    }

    let transport: Box<dyn ToolTransport> = match &args.server {
        Some(url) => Box::new(
            HttpTransport::new(url.clone()).map_err(|e| CliError::Serve(e.to_string()))?,
        ),
        None => Box::new(LocalTransport::new(Arc::new(load_engine(
            &db, setting, max_rounds,
        )?))),
    };
    let served = transport
        .schema()
        .map_err(|e| CliError::Serve(e.to_string()))?;
    if served.setting != setting.tool_setting().name() {
        return Err(CliError::Usage(format!(
            "server exposes `{}` tools but setting `{setting}` needs `{}`",
            served.setting,
            setting.tool_setting().name()
        )));
    }

    let config = EvalConfig {
        setting,
        seeds: seeds.clone(),
        max_rounds,
        workers,
    };
    let (episodes, report) = match spec {
        AgentSpec::Oracle => {
            let docs_ref: &[Document] = &documents;
            let factory = move |task: &Task, _seed: u64| -> Box<dyn AgentAdapter> {
                Box::new(OracleAgent::new(task, docs_ref))
            };
            run_eval(&tasks, docs_ref, transport.as_ref(), &agent_text, &factory, &config)
        }
        AgentSpec::Mock { seed: base } => {
            let factory = move |_task: &Task, seed: u64| -> Box<dyn AgentAdapter> {
                Box::new(ModelAgent::new(
                    MockModel::new(base.wrapping_add(seed)),
                    setting.system_prompt(),
                ))
            };
            run_eval(&tasks, &documents, transport.as_ref(), &agent_text, &factory, &config)
        }
        AgentSpec::Remote => {
            let remote_config = file.remote.clone().unwrap_or_default().to_model_config();
            let model = Arc::new(
                genpipe::remote::RemoteModel::new(remote_config)
                    .map_err(|e| CliError::stage("model", e))?,
            );
            let factory = move |_task: &Task, _seed: u64| -> Box<dyn AgentAdapter> {
                Box::new(ModelAgent::new(model.clone(), setting.system_prompt()))
            };
            run_eval(&tasks, &documents, transport.as_ref(), &agent_text, &factory, &config)
        }
    }
    .map_err(|e| CliError::stage("eval", e))?;

    write_trace_files(&traces_dir, &episodes)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    write_json(&report, &out).map_err(|e| CliError::io(&out, e))?;
    let csv_path = out.with_extension("csv");
    write_csv(&report, &csv_path).map_err(|e| CliError::io(&csv_path, e))?;

    log::info!(
        "{} episodes: acc {:.3} sc {:.3} ff {:.3} -> {}",
        episodes.len(),
        report.aggregate.acc,
        report.aggregate.sc,
        report.aggregate.ff,
        out.display()
    );
    Ok(EvalSummary {
        report_json: out,
        report_csv: csv_path,
        traces_dir,
        episodes: episodes.len(),
        accuracy: report.aggregate.acc,
        search_complete: report.aggregate.sc,
        format_followed: report.aggregate.ff,
    })
}

/// One pretty-printed trace JSON per episode, named by task id and seed.
fn write_trace_files(dir: &Path, episodes: &[ScoredEpisode]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for episode in episodes {
        let name = format!(
            "{}.seed{}.json",
            sanitize_for_filename(&episode.trace.task_id),
            episode.seed
        );
        let path = dir.join(name);
        let mut text = serde_json::to_string_pretty(&episode.trace)
            .map_err(|e| CliError::io(&path, e))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}

fn sanitize_for_filename(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Reads every `*.json` episode trace in `dir`, sorted by file name.
pub fn read_trace_files(dir: &Path) -> Result<Vec<harness::EpisodeTrace>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::io(dir, "no such directory"));
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    let mut traces = Vec::with_capacity(paths.len());
    for path in &paths {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let trace: harness::EpisodeTrace = serde_json::from_str(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        traces.push(trace);
    }
    Ok(traces)
}
