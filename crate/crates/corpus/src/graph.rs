//! Entity-conflict graph and its greedy coloring.

use std::collections::{BTreeMap, BTreeSet};

use crate::{CorpusError, Problem, ProblemId};

/// Undirected graph whose nodes are problem ids and whose edges connect
/// problems that share at least one entity name.
#[derive(Debug, Clone, Default)]
pub struct EntityGraph {
    nodes: Vec<ProblemId>,
    adjacency: BTreeMap<ProblemId, BTreeSet<ProblemId>>,
}

impl EntityGraph {
    /// Builds the graph from a corpus by inverting the name → problems map:
    /// every pair of problems listed under the same name gets an edge. This
    /// avoids the quadratic all-pairs scan on corpora where most problems
    /// share no names.
    pub fn build(problems: &[Problem]) -> Result<Self, CorpusError> {
        let mut seen: BTreeSet<&ProblemId> = BTreeSet::new();
        for p in problems {
            if !seen.insert(&p.id) {
                return Err(CorpusError::DuplicateId(p.id.clone()));
            }
        }

        let mut by_name: BTreeMap<&str, Vec<&ProblemId>> = BTreeMap::new();
        for p in problems {
            for name in &p.entity_names {
                by_name.entry(name.as_str()).or_default().push(&p.id);
            }
        }

        let mut adjacency: BTreeMap<ProblemId, BTreeSet<ProblemId>> = problems
            .iter()
            .map(|p| (p.id.clone(), BTreeSet::new()))
            .collect();
        for ids in by_name.values() {
            for i in 0..ids.len() {
                for j in (i + 1)..ids.len() {
                    adjacency.get_mut(ids[i]).unwrap().insert(ids[j].clone());
                    adjacency.get_mut(ids[j]).unwrap().insert(ids[i].clone());
                }
            }
        }

        Ok(Self {
            nodes: problems.iter().map(|p| p.id.clone()).collect(),
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &ProblemId> {
        self.nodes.iter()
    }

    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = &ProblemId> {
        self.adjacency.get(id).into_iter().flatten()
    }

    pub fn degree(&self, id: &str) -> usize {
        self.adjacency.get(id).map_or(0, |n| n.len())
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.adjacency.get(a).is_some_and(|n| n.contains(b))
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(|n| n.len()).sum::<usize>() / 2
    }

    /// All edges as ordered pairs (a < b lexicographically).
    pub fn edges(&self) -> Vec<(ProblemId, ProblemId)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (a, neighbors) in &self.adjacency {
            for b in neighbors {
                if a < b {
                    edges.push((a.clone(), b.clone()));
                }
            }
        }
        edges
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.values().map(|n| n.len()).max().unwrap_or(0)
    }
}

/// Builds the entity-conflict graph for a corpus.
pub fn build_entity_graph(problems: &[Problem]) -> Result<EntityGraph, CorpusError> {
    EntityGraph::build(problems)
}

/// Greedy proper coloring.
///
/// Nodes are visited in descending degree order (ties broken by ascending
/// id) and each receives the smallest color index not used by an
/// already-colored neighbor. The result is a proper coloring with at most
/// Δ+1 colors, and is deterministic for a given graph.
pub fn color_graph(graph: &EntityGraph) -> BTreeMap<ProblemId, u32> {
    let mut order: Vec<&ProblemId> = graph.nodes().collect();
    order.sort_by(|a, b| {
        graph
            .degree(b)
            .cmp(&graph.degree(a))
            .then_with(|| a.cmp(b))
    });

    let mut coloring: BTreeMap<ProblemId, u32> = BTreeMap::new();
    for id in order {
        let used: BTreeSet<u32> = graph
            .neighbors(id)
            .filter_map(|n| coloring.get(n).copied())
            .collect();
        let mut color = 0u32;
        while used.contains(&color) {
            color += 1;
        }
        coloring.insert(id.clone(), color);
    }
    coloring
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn problem(id: &str, names: &[&str]) -> Problem {
        Problem {
            id: id.into(),
            text: format!("problem {id}"),
            entity_names: names.iter().map(|s| s.to_string()).collect(),
            is_generic: false,
            answer: None,
        }
    }

    /// Brute-force O(n²) edge oracle: pairwise name-set intersection.
    fn oracle_edges(problems: &[Problem]) -> BTreeSet<(ProblemId, ProblemId)> {
        let mut edges = BTreeSet::new();
        for i in 0..problems.len() {
            for j in (i + 1)..problems.len() {
                let (a, b) = (&problems[i], &problems[j]);
                if a.entity_names.intersection(&b.entity_names).next().is_some() {
                    let (x, y) = if a.id < b.id {
                        (a.id.clone(), b.id.clone())
                    } else {
                        (b.id.clone(), a.id.clone())
                    };
                    edges.insert((x, y));
                }
            }
        }
        edges
    }

    #[test]
    fn disjoint_names_yield_no_edges() {
        let g = build_entity_graph(&[problem("P1", &["Alice"]), problem("P2", &["Bob"])]).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn pairwise_intersections_yield_edges() {
        let g = build_entity_graph(&[
            problem("P1", &["Alice"]),
            problem("P2", &["Alice", "Bob"]),
            problem("P3", &["Bob"]),
        ])
        .unwrap();
        assert!(g.has_edge("P1", "P2"));
        assert!(g.has_edge("P2", "P3"));
        assert!(!g.has_edge("P1", "P3"));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn duplicate_id_is_an_error() {
        let err =
            build_entity_graph(&[problem("P1", &["A"]), problem("P1", &["B"])]).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId(id) if id == "P1"));
    }

    #[test]
    fn matches_brute_force_oracle_on_random_corpus() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pool: Vec<String> = (0..10).map(|i| format!("Name{i}")).collect();
        let problems: Vec<Problem> = (0..50)
            .map(|i| {
                let k = rng.random_range(1..=3);
                let names: Vec<&str> = pool
                    .choose_multiple(&mut rng, k)
                    .map(|s| s.as_str())
                    .collect();
                problem(&format!("P{i:02}"), &names)
            })
            .collect();
        let g = build_entity_graph(&problems).unwrap();
        let got: BTreeSet<(ProblemId, ProblemId)> = g.edges().into_iter().collect();
        assert_eq!(got, oracle_edges(&problems));
    }

    #[test]
    fn triangle_needs_three_colors() {
        let g = build_entity_graph(&[
            problem("P1", &["a", "b"]),
            problem("P2", &["b", "c"]),
            problem("P3", &["c", "a"]),
        ])
        .unwrap();
        let coloring = color_graph(&g);
        let colors: BTreeSet<u32> = coloring.values().copied().collect();
        assert_eq!(colors.len(), 3);
    }

    #[test]
    fn edgeless_graph_is_monochrome() {
        let g = build_entity_graph(&[problem("P1", &["a"]), problem("P2", &["b"])]).unwrap();
        let coloring = color_graph(&g);
        assert!(coloring.values().all(|&c| c == 0));
    }

    #[test]
    fn coloring_is_proper_and_within_greedy_bound() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // G(20, 0.3) realized through shared synthetic names, one per edge.
        let n = 20;
        let mut names: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut next = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.3 {
                    let name = format!("shared{next}");
                    next += 1;
                    names[i].push(name.clone());
                    names[j].push(name);
                }
            }
        }
        let problems: Vec<Problem> = names
            .into_iter()
            .enumerate()
            .map(|(i, ns)| {
                let refs: Vec<&str> = ns.iter().map(|s| s.as_str()).collect();
                problem(&format!("P{i:02}"), &refs)
            })
            .collect();
        let g = build_entity_graph(&problems).unwrap();
        let coloring = color_graph(&g);
        for (a, b) in g.edges() {
            assert_ne!(coloring[&a], coloring[&b], "edge ({a},{b}) shares a color");
        }
        let max_color = coloring.values().copied().max().unwrap_or(0) as usize;
        assert!(max_color <= g.max_degree(), "greedy exceeded Δ+1 colors");
        // Contiguity: every color below the max is used.
        let used: BTreeSet<u32> = coloring.values().copied().collect();
        assert_eq!(used.len(), max_color + 1);
    }
}
