//! Evaluation runner: seeds × tasks, executed on a bounded worker pool
//! with order-preserving results.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use genpipe::{Document, Task};
use toolsrv::ToolTransport;

use crate::episode::{run_episode, EpisodeConfig, EpisodeTrace};
use crate::prompts::EvalSetting;
use crate::report::{MetricsReport, TaskRow};
use crate::score::{oracle_doc_ids, score, TaskScore};
use crate::{AgentAdapter, HarnessError};

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub setting: EvalSetting,
    /// One full pass over the tasks per seed; the seed is handed to the
    /// agent factory.
    pub seeds: Vec<u64>,
    pub max_rounds: u32,
    /// Worker threads; 0 picks the machine's available parallelism.
    pub workers: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            setting: EvalSetting::ZeroShot,
            seeds: vec![0, 1, 2],
            max_rounds: 50,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScoredEpisode {
    pub seed: u64,
    pub trace: EpisodeTrace,
    pub score: TaskScore,
}

/// Build one agent per (task, seed) episode.
pub type AgentFactory<'a> = &'a (dyn Fn(&Task, u64) -> Box<dyn AgentAdapter> + Sync);

/// Run every task once per seed against `transport`, score each episode,
/// and assemble the report. Episode order in the results is seed-major,
/// then task order, regardless of worker scheduling. Agent failures are
/// recorded on their traces and scored; only setup errors abort the run.
pub fn run_eval(
    tasks: &[Task],
    documents: &[Document],
    transport: &dyn ToolTransport,
    agent_name: &str,
    make_agent: AgentFactory,
    config: &EvalConfig,
) -> Result<(Vec<ScoredEpisode>, MetricsReport), HarnessError> {
    let oracle: BTreeMap<&str, BTreeSet<String>> = tasks
        .iter()
        .map(|t| (t.source_problem_id.as_str(), oracle_doc_ids(t, documents)))
        .collect();

    let jobs: Vec<(u64, &Task)> = config
        .seeds
        .iter()
        .flat_map(|&seed| tasks.iter().map(move |t| (seed, t)))
        .collect();

    let workers = if config.workers == 0 {
        thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    } else {
        config.workers
    }
    .min(jobs.len().max(1));

    let episode_config = EpisodeConfig {
        max_rounds: config.max_rounds,
    };
    let next_job = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<ScoredEpisode, HarnessError>>>> =
        jobs.iter().map(|_| Mutex::new(None)).collect();

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next_job.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let (seed, task) = jobs[i];
                let outcome = run_one(task, seed, transport, make_agent, &episode_config, &oracle);
                *slots[i].lock().unwrap() = Some(outcome);
            });
        }
    });

    let mut episodes = Vec::with_capacity(jobs.len());
    for slot in slots {
        let outcome = slot
            .into_inner()
            .unwrap()
            .expect("every job slot is filled before the scope ends");
        episodes.push(outcome?);
    }

    let rows: Vec<TaskRow> = episodes
        .iter()
        .map(|e| TaskRow {
            seed: e.seed,
            task_id: e.trace.task_id.clone(),
            score: e.score.clone(),
        })
        .collect();
    let report = MetricsReport::from_rows(
        config.setting.name(),
        agent_name,
        &config.seeds,
        rows,
        config.max_rounds,
    );
    Ok((episodes, report))
}

fn run_one(
    task: &Task,
    seed: u64,
    transport: &dyn ToolTransport,
    make_agent: AgentFactory,
    episode_config: &EpisodeConfig,
    oracle: &BTreeMap<&str, BTreeSet<String>>,
) -> Result<ScoredEpisode, HarnessError> {
    let mut agent = make_agent(task, seed);
    let trace = run_episode(task, transport, agent.as_mut(), episode_config)?;
    if let Some(reason) = &trace.failure {
        log::warn!(
            "episode for task {} (seed {seed}) failed mid-run: {reason}; scoring the partial trace",
            task.source_problem_id
        );
    }
    let empty = BTreeSet::new();
    let relevant = oracle
        .get(task.source_problem_id.as_str())
        .unwrap_or(&empty);
    let score = score(&trace, &task.gold_answer, relevant);
    Ok(ScoredEpisode { seed, trace, score })
}
