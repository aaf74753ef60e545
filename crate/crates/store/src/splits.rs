//! Full/Medium/Small split construction.

use std::collections::BTreeSet;

use genpipe::{Document, Task};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The three benchmark sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Full,
    Medium,
    Small,
}

impl SplitName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SplitName::Full => "full",
            SplitName::Medium => "medium",
            SplitName::Small => "small",
        }
    }
}

impl std::str::FromStr for SplitName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "full" => Ok(SplitName::Full),
            "medium" => Ok(SplitName::Medium),
            "small" => Ok(SplitName::Small),
            other => Err(format!("unknown split `{other}` (full|medium|small)")),
        }
    }
}

/// One split: its tasks plus exactly its tasks' documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitData {
    pub tasks: Vec<Task>,
    pub documents: Vec<Document>,
}

/// All three splits of one build.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Splits {
    pub full: SplitData,
    pub medium: SplitData,
    pub small: SplitData,
}

impl Splits {
    pub fn get(&self, name: SplitName) -> &SplitData {
        match name {
            SplitName::Full => &self.full,
            SplitName::Medium => &self.medium,
            SplitName::Small => &self.small,
        }
    }
}

/// Round-half-up quarter used for both subsampling steps.
fn quarter(n: usize) -> usize {
    (n + 2) / 4
}

/// Uniformly samples `k` of `n` indices with a seeded partial Fisher-Yates;
/// the result keeps ascending order.
fn sample_indices(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        indices.swap(i, j);
    }
    let mut chosen: Vec<usize> = indices[..k.min(n)].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Builds the Full/Medium/Small splits.
///
/// Medium holds 25% of the filtered tasks (round half-up), Small holds 25% of
/// Medium (6.25% of Full), sampled uniformly under `rng_seed` and nested by
/// construction: small ⊆ medium ⊆ full. Each split's database holds exactly
/// the documents of its tasks, in task order.
pub fn make_splits(tasks: &[Task], documents: &[Document], rng_seed: u64) -> Splits {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let medium_indices = sample_indices(tasks.len(), quarter(tasks.len()), &mut rng);
    let within_medium = sample_indices(medium_indices.len(), quarter(medium_indices.len()), &mut rng);
    let small_indices: Vec<usize> = within_medium.iter().map(|&i| medium_indices[i]).collect();

    let full = split_of(tasks, documents, &(0..tasks.len()).collect::<Vec<_>>());
    let medium = split_of(tasks, documents, &medium_indices);
    let small = split_of(tasks, documents, &small_indices);
    Splits {
        full,
        medium,
        small,
    }
}

fn split_of(tasks: &[Task], documents: &[Document], indices: &[usize]) -> SplitData {
    let chosen_tasks: Vec<Task> = indices.iter().map(|&i| tasks[i].clone()).collect();
    let ids: BTreeSet<&str> = chosen_tasks
        .iter()
        .map(|t| t.source_problem_id.as_str())
        .collect();
    let documents: Vec<Document> = documents
        .iter()
        .filter(|d| ids.contains(d.source.0.as_str()))
        .cloned()
        .collect();
    SplitData {
        tasks: chosen_tasks,
        documents,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use genpipe::DocMetadata;

    fn task(i: usize, premises: usize) -> Task {
        Task {
            source_problem_id: format!("p{i:03}"),
            question: format!("How many things for task {i}?"),
            premises: (0..premises).map(|j| format!("premise {i}.{j}")).collect(),
            gold_answer: "1".parse().unwrap(),
            timestamp: "1990-09".parse().unwrap(),
        }
    }

    fn fixture(n: usize) -> (Vec<Task>, Vec<Document>) {
        let tasks: Vec<Task> = (0..n).map(|i| task(i, 1 + i % 3)).collect();
        let documents: Vec<Document> = tasks
            .iter()
            .flat_map(|t| {
                (0..t.premises.len()).map(|j| Document {
                    doc_id: format!("{}/d{j}", t.source_problem_id),
                    content: format!("content {j} of {}", t.source_problem_id),
                    metadata: DocMetadata {
                        timestamp: t.timestamp,
                        names: vec![],
                        doc_type: "Log".into(),
                    },
                    source: (t.source_problem_id.clone(), j),
                    anonymized: false,
                })
            })
            .collect();
        (tasks, documents)
    }

    fn ids(split: &SplitData) -> BTreeSet<String> {
        split
            .tasks
            .iter()
            .map(|t| t.source_problem_id.clone())
            .collect()
    }

    #[test]
    fn sixteen_tasks_give_medium_4_small_1() {
        let (tasks, docs) = fixture(16);
        let splits = make_splits(&tasks, &docs, 7);
        assert_eq!(splits.full.tasks.len(), 16);
        assert_eq!(splits.medium.tasks.len(), 4);
        assert_eq!(splits.small.tasks.len(), 1);
    }

    #[test]
    fn splits_are_nested() {
        let (tasks, docs) = fixture(37);
        let splits = make_splits(&tasks, &docs, 3);
        let (f, m, s) = (ids(&splits.full), ids(&splits.medium), ids(&splits.small));
        assert!(m.is_subset(&f));
        assert!(s.is_subset(&m));
    }

    #[test]
    fn split_documents_equal_union_of_member_task_docs() {
        let (tasks, docs) = fixture(24);
        let splits = make_splits(&tasks, &docs, 11);
        for split in [&splits.full, &splits.medium, &splits.small] {
            let task_ids = ids(split);
            let expected: BTreeSet<&str> = docs
                .iter()
                .filter(|d| task_ids.contains(&d.source.0))
                .map(|d| d.doc_id.as_str())
                .collect();
            let got: BTreeSet<&str> = split.documents.iter().map(|d| d.doc_id.as_str()).collect();
            assert_eq!(got, expected);
            // Exactly one doc per premise of each member task.
            let total: usize = split.tasks.iter().map(|t| t.premises.len()).sum();
            assert_eq!(split.documents.len(), total);
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let (tasks, docs) = fixture(40);
        let a = make_splits(&tasks, &docs, 5);
        let b = make_splits(&tasks, &docs, 5);
        assert_eq!(ids(&a.medium), ids(&b.medium));
        assert_eq!(ids(&a.small), ids(&b.small));
        let differs = (0..20).any(|seed| ids(&make_splits(&tasks, &docs, seed).medium) != ids(&a.medium));
        assert!(differs, "seed never changes the sample");
    }

    #[test]
    fn quarter_rounds_half_up() {
        assert_eq!(quarter(16), 4);
        assert_eq!(quarter(10), 3); // 2.5
        assert_eq!(quarter(13), 3); // 3.25
        assert_eq!(quarter(14), 4); // 3.5
        assert_eq!(quarter(0), 0);
        assert_eq!(quarter(1), 0); // 0.25 rounds down
        assert_eq!(quarter(2), 1); // 0.5 rounds up
    }
}
