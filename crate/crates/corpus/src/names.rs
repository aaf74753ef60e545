//! Name pools and deterministic name assignment for generic problems.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{CorpusError, Problem, ProblemId};

/// First/last name pools used to mint full names for generic protagonists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamePools {
    pub first_names: Vec<String>,
    pub last_names: Vec<String>,
}

impl NamePools {
    /// Loads pools from a JSON file of shape
    /// `{"first_names": [...], "last_names": [...]}`.
    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CorpusError::Parse {
            path: path.display().to_string(),
            line: 0,
            source,
        })
    }

    pub fn capacity(&self) -> usize {
        self.first_names.len() * self.last_names.len()
    }
}

impl Default for NamePools {
    fn default() -> Self {
        let firsts = [
            "Alice", "Ben", "Clara", "David", "Emma", "Felix", "Grace", "Henry", "Iris", "Jonas",
            "Kara", "Liam", "Mona", "Noah", "Olive", "Peter", "Quinn", "Rosa", "Samuel", "Tessa",
            "Ulysses", "Vera", "Walter", "Xenia", "Yusuf", "Zelda",
        ];
        let lasts = [
            "Abbott", "Barnes", "Calloway", "Dunn", "Escott", "Fletcher", "Granger", "Holloway",
            "Irwin", "Jennings", "Kowalski", "Lindqvist", "Marsh", "Novak", "Osborne", "Prescott",
            "Quimby", "Rutherford", "Sandoval", "Thatcher", "Underwood", "Vance", "Whitfield",
            "Xanders", "Yarrow", "Zimmerman",
        ];
        Self {
            first_names: firsts.iter().map(|s| s.to_string()).collect(),
            last_names: lasts.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Assigns each generic problem a distinct full name.
///
/// Combinations are enumerated in lexicographic order of
/// (first-name index, last-name index) and handed out in problem order, so
/// the mapping is deterministic and injective. Errors if the pools cannot
/// cover all generic problems.
pub fn assign_names(
    generic_problems: &[Problem],
    pools: &NamePools,
) -> Result<BTreeMap<ProblemId, String>, CorpusError> {
    if generic_problems.len() > pools.capacity() {
        return Err(CorpusError::NamePoolExhausted {
            needed: generic_problems.len(),
            available: pools.capacity(),
        });
    }
    let mut combos = (0..pools.first_names.len())
        .flat_map(|fi| (0..pools.last_names.len()).map(move |li| (fi, li)));
    let mut out = BTreeMap::new();
    for problem in generic_problems {
        let (fi, li) = combos.next().expect("capacity checked above");
        out.insert(
            problem.id.clone(),
            format!("{} {}", pools.first_names[fi], pools.last_names[li]),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn generic(id: &str) -> Problem {
        Problem {
            id: id.into(),
            text: "a farmer has some hens".into(),
            entity_names: BTreeSet::new(),
            is_generic: true,
            answer: None,
        }
    }

    fn pools(firsts: &[&str], lasts: &[&str]) -> NamePools {
        NamePools {
            first_names: firsts.iter().map(|s| s.to_string()).collect(),
            last_names: lasts.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn enumerates_lexicographically() {
        let out = assign_names(
            &[generic("g1"), generic("g2")],
            &pools(&["Alice", "Ben"], &["Smith"]),
        )
        .unwrap();
        assert_eq!(out["g1"], "Alice Smith");
        assert_eq!(out["g2"], "Ben Smith");
    }

    #[test]
    fn empty_input_yields_empty_map() {
        let out = assign_names(&[], &pools(&["A"], &["B"])).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn pigeonhole_uses_every_combination_once() {
        let problems: Vec<Problem> = (0..6).map(|i| generic(&format!("g{i}"))).collect();
        let p = pools(&["A", "B", "C"], &["X", "Y"]);
        let out = assign_names(&problems, &p).unwrap();
        let values: BTreeSet<&String> = out.values().collect();
        assert_eq!(values.len(), 6, "names must be injective");
        let expected: BTreeSet<String> = ["A X", "A Y", "B X", "B Y", "C X", "C Y"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(values.into_iter().cloned().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn exhaustion_reports_required_size() {
        let problems: Vec<Problem> = (0..7).map(|i| generic(&format!("g{i}"))).collect();
        let err = assign_names(&problems, &pools(&["A", "B", "C"], &["X", "Y"])).unwrap_err();
        match err {
            CorpusError::NamePoolExhausted { needed, available } => {
                assert_eq!((needed, available), (7, 6));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn default_pools_are_nontrivial() {
        let p = NamePools::default();
        assert!(p.capacity() >= 26 * 26);
        let firsts: BTreeSet<&String> = p.first_names.iter().collect();
        assert_eq!(firsts.len(), p.first_names.len(), "no duplicate first names");
    }
}
