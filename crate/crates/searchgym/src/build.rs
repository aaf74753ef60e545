//! `build`: problems corpus → generated tasks and documents → one split's
//! searchable database, with sidecar task/document files and a manifest.

use std::path::{Path, PathBuf};

use clap::Args;
use corpus::read_problems;
use genpipe::{
    run_pipeline, write_documents, write_tasks, BuildOutput, MockModel, PipelineConfig, TextModel,
};
use store::{index_documents, make_splits, persist_index, HashedBowEmbedder, SplitData, SplitName};

use crate::config::FileConfig;
use crate::manifest::{
    write_manifest, BuildManifest, EmbedderInfo, ManifestSeeds, SplitCounts,
    MANIFEST_SCHEMA_VERSION,
};
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct BuildArgs {
    /// Problems corpus, one JSON record per line.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Output database file; tasks/documents/manifest sidecars share its stem.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Which split to build: full, medium, or small [default: full].
    #[arg(long)]
    pub split: Option<String>,
    /// Pipeline master seed [default: 17].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Split subsampling seed [default: 0].
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Fraction of documents to anonymize [default: 0.3].
    #[arg(long)]
    pub anonymize_fraction: Option<f64>,
    /// Timestamp assigned to color 0, as YYYY-MM [default: 1990-09].
    #[arg(long)]
    pub base_timestamp: Option<String>,
    /// Embedding dimension for the bag-of-words index [default: 256].
    #[arg(long)]
    pub embed_dim: Option<usize>,
    /// Text-model backend: mock or remote [default: mock].
    #[arg(long)]
    pub model: Option<String>,
    /// Extra seed mixed into the mock model [default: the pipeline seed].
    #[arg(long)]
    pub model_seed: Option<u64>,
    /// Worker threads for per-problem stages; 0 = one per core.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Where everything landed, for callers that want to chain commands.
#[derive(Debug, Clone)]
pub struct BuildSummary {
    pub db_path: PathBuf,
    pub tasks_path: PathBuf,
    pub documents_path: PathBuf,
    pub manifest_path: PathBuf,
    pub tasks: usize,
    pub documents: usize,
}

/// Sidecar paths derived from the database path: `env.sgdb` sits next to
/// `env.tasks.jsonl`, `env.docs.jsonl`, and `env.manifest.json`.
pub fn sidecar_paths(db: &Path) -> (PathBuf, PathBuf, PathBuf) {
    (
        db.with_extension("tasks.jsonl"),
        db.with_extension("docs.jsonl"),
        db.with_extension("manifest.json"),
    )
}

pub fn cmd_build(args: &BuildArgs, file: &FileConfig) -> Result<BuildSummary, CliError> {
    let corpus_path = args
        .corpus
        .clone()
        .or_else(|| file.corpus.clone())
        .ok_or_else(|| CliError::Usage("build needs --corpus".into()))?;
    let db_path = args
        .out
        .clone()
        .or_else(|| file.out.clone().or_else(|| file.db.clone()))
        .ok_or_else(|| CliError::Usage("build needs --out".into()))?;
    let split: SplitName = args
        .split
        .clone()
        .or_else(|| file.split.clone())
        .unwrap_or_else(|| "full".into())
        .parse()
        .map_err(CliError::Usage)?;
    let seed = args.seed.or(file.seed).unwrap_or(17);
    let split_seed = args.split_seed.or(file.split_seed).unwrap_or(0);
    let model_seed = args.model_seed.or(file.model_seed).unwrap_or(seed);
    let embed_dim = args.embed_dim.or(file.embed_dim).unwrap_or(256);
    if embed_dim == 0 {
        return Err(CliError::Usage("--embed-dim must be positive".into()));
    }
    let model_kind = args
        .model
        .clone()
        .or_else(|| file.model.clone())
        .unwrap_or_else(|| "mock".into());
    let base_timestamp = args
        .base_timestamp
        .clone()
        .or_else(|| file.base_timestamp.clone())
        .unwrap_or_else(|| "1990-09".into())
        .parse()
        .map_err(|e| CliError::Usage(format!("--base-timestamp: {e}")))?;

    if !corpus_path.exists() {
        return Err(CliError::io(&corpus_path, "no such file"));
    }
    let problems = read_problems(&corpus_path).map_err(|e| CliError::Data(e.to_string()))?;
    if problems.is_empty() {
        return Err(CliError::Data(format!(
            "corpus {} contains no problems",
            corpus_path.display()
        )));
    }

    let config = PipelineConfig {
        seed,
        anonymize_fraction: args
            .anonymize_fraction
            .or(file.anonymize_fraction)
            .unwrap_or(0.3),
        base_timestamp,
        workers: args.workers.or(file.workers).unwrap_or(0),
        ..PipelineConfig::default()
    };

    let output = match model_kind.as_str() {
        "mock" => run(&problems, &MockModel::new(model_seed), &config)?,
        "remote" => {
            let remote_config = file
                .remote
                .clone()
                .unwrap_or_default()
                .to_model_config();
            let model = genpipe::remote::RemoteModel::new(remote_config)
                .map_err(|e| CliError::stage("model", e))?;
            run(&problems, &model, &config)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown model backend `{other}` (mock|remote)"
            )))
        }
    };

    let splits = make_splits(&output.tasks, &output.documents, split_seed);
    let chosen: &SplitData = match split {
        SplitName::Full => &splits.full,
        SplitName::Medium => &splits.medium,
        SplitName::Small => &splits.small,
    };
    if chosen.tasks.is_empty() {
        return Err(CliError::Data(format!(
            "split `{split:?}` selects no tasks ({} survived the pipeline); use a larger corpus or the full split",
            output.tasks.len()
        )));
    }

    let embedder = HashedBowEmbedder::new(embed_dim);
    let index = index_documents(&chosen.documents, &embedder)
        .map_err(|e| CliError::stage("index", e))?;
    if let Some(parent) = db_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    persist_index(&index, &db_path).map_err(|e| CliError::io(&db_path, e))?;

    let (tasks_path, docs_path, manifest_path) = sidecar_paths(&db_path);
    write_tasks(&tasks_path, &chosen.tasks).map_err(|e| CliError::io(&tasks_path, e))?;
    write_documents(&docs_path, &chosen.documents).map_err(|e| CliError::io(&docs_path, e))?;

    let manifest = BuildManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        split: format!("{split:?}").to_lowercase(),
        seeds: ManifestSeeds {
            pipeline: seed,
            split: split_seed,
            model: model_seed,
        },
        model: model_kind,
        embedder: EmbedderInfo {
            kind: "hashed_bow".into(),
            dimension: embed_dim,
        },
        pipeline: output.stats.clone(),
        split_counts: SplitCounts {
            tasks: chosen.tasks.len(),
            documents: chosen.documents.len(),
        },
        drops: output.dropped.iter().map(Into::into).collect(),
        rejected_task_ids: output
            .rejected
            .iter()
            .map(|(task, _)| task.source_problem_id.clone())
            .collect(),
    };
    write_manifest(&manifest_path, &manifest)?;

    log::info!(
        "built {} split: {} tasks / {} documents -> {}",
        manifest.split,
        chosen.tasks.len(),
        chosen.documents.len(),
        db_path.display()
    );
    Ok(BuildSummary {
        db_path,
        tasks_path,
        documents_path: docs_path,
        manifest_path,
        tasks: chosen.tasks.len(),
        documents: chosen.documents.len(),
    })
}

fn run<M: TextModel>(
    problems: &[corpus::Problem],
    model: &M,
    config: &PipelineConfig,
) -> Result<BuildOutput, CliError> {
    run_pipeline(problems, model, config).map_err(|e| CliError::stage("pipeline", e))
}
