//! End-to-end pipeline orchestration.
//!
//! Per-problem stages run on a small worker pool; corpus-level stages (name
//! assignment, conflict-graph coloring, anonymization selection) are serial
//! and deterministic. The whole build is a pure function of
//! `(corpus, seed, model)` — with the seeded mock backend two runs produce
//! byte-identical outputs.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use corpus::{
    assign_names, assign_timestamps, build_entity_graph, color_graph, NamePools, Problem,
    Timestamp,
};
use serde::{Deserialize, Serialize};

use crate::anonymize::anonymize;
use crate::docgen::generate_documents;
use crate::entity::detect_entity;
use crate::filter::filter_solvable;
use crate::independence::{verify_independence, IndependenceVerdict};
use crate::model::TextModel;
use crate::shard::shard;
use crate::specialize::specialize_entity;
use crate::task::{Document, Task};
use crate::GenError;

/// Build-wide settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Master seed for anonymization selection (and for callers to seed
    /// their model with).
    pub seed: u64,
    /// Fraction of documents to anonymize.
    pub anonymize_fraction: f64,
    /// Color 0 maps to this month.
    pub base_timestamp: Timestamp,
    /// Worker threads for per-problem stages; 0 = one per available core
    /// (capped at 8).
    pub workers: usize,
    /// Name pools for generic problems.
    #[serde(default)]
    pub name_pools: Option<NamePools>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 17,
            anonymize_fraction: 0.3,
            base_timestamp: "1990-09".parse().expect("canonical"),
            workers: 0,
            name_pools: None,
        }
    }
}

/// A problem that fell out of the pipeline, and why.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DropRecord {
    pub problem_id: String,
    pub stage: String,
    pub reason: String,
}

/// Aggregate counters for one build.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub input_problems: usize,
    pub generic_specialized: usize,
    pub conflict_edges: usize,
    pub colors_used: usize,
    pub independence_patches: usize,
    pub anonymized_documents: usize,
    pub tasks_kept: usize,
    pub documents_kept: usize,
    pub dropped_unsolvable: usize,
}

/// Everything a build produces.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    /// Tasks that survived solvability filtering, in input order.
    pub tasks: Vec<Task>,
    /// Documents of surviving tasks, grouped by task, premise order within.
    pub documents: Vec<Document>,
    /// Tasks rejected by the solvability filter, with their documents
    /// (useful for audits; not part of the served environment).
    pub rejected: Vec<(Task, Vec<Document>)>,
    pub dropped: Vec<DropRecord>,
    pub stats: PipelineStats,
}

/// Runs the full construction pipeline over `problems`.
pub fn run_pipeline<M: TextModel>(
    problems: &[Problem],
    model: &M,
    config: &PipelineConfig,
) -> Result<BuildOutput, GenError> {
    let workers = effective_workers(config.workers);
    let mut stats = PipelineStats {
        input_problems: problems.len(),
        ..Default::default()
    };

    // Stage 1: entity detection (skipped for pre-annotated records).
    struct Prepared {
        problem: Problem,
        names: Vec<String>,
        is_generic: bool,
    }
    let mut prepared: Vec<Prepared> = parallel_try_map(problems, workers, |_, p| {
        if p.entity_names.is_empty() {
            let detected = detect_entity(p, model)?;
            Ok(Prepared {
                problem: p.clone(),
                names: detected.names,
                is_generic: detected.is_generic,
            })
        } else {
            Ok(Prepared {
                problem: p.clone(),
                names: p.entity_names.iter().cloned().collect(),
                is_generic: p.is_generic,
            })
        }
    })?;

    // Stage 2: name assignment + specialization for generic problems.
    let generic_problems: Vec<Problem> = prepared
        .iter()
        .filter(|p| p.is_generic)
        .map(|p| p.problem.clone())
        .collect();
    let pools = config.name_pools.clone().unwrap_or_default();
    let assigned: BTreeMap<String, String> = assign_names(&generic_problems, &pools)?;
    let specialized: BTreeMap<String, String> = {
        let generic_refs: Vec<&Prepared> = prepared.iter().filter(|p| p.is_generic).collect();
        let texts = parallel_try_map(&generic_refs, workers, |_, p| {
            let name = &assigned[&p.problem.id];
            let phrase = p.names.first().map(String::as_str).unwrap_or("the subject");
            let text = specialize_entity(&p.problem, phrase, name, model)?;
            Ok((p.problem.id.clone(), text))
        })?;
        texts.into_iter().collect()
    };
    for p in prepared.iter_mut() {
        if p.is_generic {
            p.problem.text = specialized[&p.problem.id].clone();
            p.names = vec![assigned[&p.problem.id].clone()];
            stats.generic_specialized += 1;
        }
        p.problem.entity_names = p.names.iter().cloned().collect();
    }

    // Stage 3: conflict graph → coloring → timestamps.
    let final_problems: Vec<Problem> = prepared.iter().map(|p| p.problem.clone()).collect();
    let graph = build_entity_graph(&final_problems)?;
    stats.conflict_edges = graph.edge_count();
    let coloring = color_graph(&graph);
    stats.colors_used = coloring.values().copied().max().map_or(0, |m| m as usize + 1);
    let timestamps = assign_timestamps(&coloring, config.base_timestamp);

    // Stages 4–5: shard, generate documents, verify independence.
    let patch_count = AtomicUsize::new(0);
    let mut built: Vec<(Task, Vec<Document>)> = parallel_try_map(&prepared, workers, |_, p| {
        let timestamp = timestamps[&p.problem.id];
        let embed = graph.degree(&p.problem.id) > 0;
        let task = shard(&p.problem, timestamp, embed, model)?;
        let mut docs = generate_documents(&task, &p.names, model)?;
        for index in 0..docs.len() {
            let target = task.premises[index].clone();
            let others: Vec<String> = task
                .premises
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != index)
                .map(|(_, s)| s.clone())
                .collect();
            let verdict = verify_independence(&mut docs[index], &target, &others, model)?;
            if let IndependenceVerdict::Violated { .. } = verdict {
                patch_count.fetch_add(1, Ordering::Relaxed);
            }
        }
        Ok((task, docs))
    })?;
    stats.independence_patches = patch_count.load(Ordering::Relaxed);

    // Stage 6: anonymization across the whole document set.
    let mut all_docs: Vec<Document> = Vec::new();
    let mut doc_ranges: Vec<std::ops::Range<usize>> = Vec::with_capacity(built.len());
    for (_, docs) in &built {
        let start = all_docs.len();
        all_docs.extend(docs.iter().cloned());
        doc_ranges.push(start..all_docs.len());
    }
    let selected = anonymize(&mut all_docs, config.anonymize_fraction, config.seed);
    stats.anonymized_documents = selected.len();
    for ((_, docs), range) in built.iter_mut().zip(&doc_ranges) {
        docs.clone_from_slice(&all_docs[range.clone()]);
    }

    // Stage 7: solvability filtering.
    let verdicts: Vec<bool> = {
        let refs: Vec<&(Task, Vec<Document>)> = built.iter().collect();
        parallel_try_map(&refs, workers, |_, (task, docs)| {
            Ok(filter_solvable(task, docs, model))
        })?
    };

    let mut tasks = Vec::new();
    let mut documents = Vec::new();
    let mut rejected = Vec::new();
    let mut dropped = Vec::new();
    for ((task, docs), keep) in built.into_iter().zip(verdicts) {
        if keep {
            tasks.push(task);
            documents.extend(docs);
        } else {
            dropped.push(DropRecord {
                problem_id: task.source_problem_id.clone(),
                stage: "solvability".into(),
                reason: "model answer did not match the gold answer".into(),
            });
            rejected.push((task, docs));
        }
    }
    stats.tasks_kept = tasks.len();
    stats.documents_kept = documents.len();
    stats.dropped_unsolvable = dropped.len();

    Ok(BuildOutput {
        tasks,
        documents,
        rejected,
        dropped,
        stats,
    })
}

fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Applies `f` to every item on `workers` threads, preserving input order.
/// The first error wins and cancels remaining work.
fn parallel_try_map<T: Sync, U: Send>(
    items: &[T],
    workers: usize,
    f: impl Fn(usize, &T) -> Result<U, GenError> + Sync,
) -> Result<Vec<U>, GenError> {
    let n = items.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let workers = workers.clamp(1, n);
    if workers == 1 {
        return items
            .iter()
            .enumerate()
            .map(|(i, item)| f(i, item))
            .collect();
    }
    let slots: Vec<Mutex<Option<U>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let failure: Mutex<Option<GenError>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n || failure.lock().unwrap().is_some() {
                    return;
                }
                match f(i, &items[i]) {
                    Ok(value) => *slots[i].lock().unwrap() = Some(value),
                    Err(err) => {
                        let mut failure = failure.lock().unwrap();
                        if failure.is_none() {
                            *failure = Some(err);
                        }
                        return;
                    }
                }
            });
        }
    });
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("all slots filled"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<usize> = (0..100).collect();
        let out = parallel_try_map(&items, 4, |i, &x| {
            assert_eq!(i, x);
            Ok(x * 2)
        })
        .unwrap();
        assert_eq!(out, (0..100).map(|x| x * 2).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_map_surfaces_errors() {
        let items: Vec<usize> = (0..10).collect();
        let err = parallel_try_map(&items, 3, |_, &x| {
            if x == 5 {
                Err(GenError::EmptyPremises {
                    problem_id: "p5".into(),
                })
            } else {
                Ok(x)
            }
        })
        .unwrap_err();
        assert!(matches!(err, GenError::EmptyPremises { .. }));
    }
}
