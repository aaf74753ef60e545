//! Path mapping against a brute-force oracle, exhaustive classification
//! checks, and bucketed statistics cross-checks.

use graphlab::{
    classify_steps, kmeans, map_path, ratios, trace_graph_stats, GraphError, KmeansConfig,
    ReasoningPath, StepKind, TraceCall,
};
use proptest::prelude::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use store::{Embedder, HashedBowEmbedder};

const TOPICS: [&str; 12] = [
    "nancy bought hardcover novels downtown",
    "orlando loaded orange crates at dawn",
    "priya cycled along the river trail",
    "malik repaired antique brass clocks",
    "the bakery sold cinnamon roll trays",
    "greta planted tulip bulbs in rows",
    "ferry schedules across the harbor",
    "warehouse inventory of copper pipe",
    "school library overdue book fines",
    "street market apple cider pressing",
    "night train freight manifest totals",
    "museum ticket sales by weekday",
];

fn topic_model(embedder: &HashedBowEmbedder, k: usize) -> graphlab::ReasoningGraphModel {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut ids = Vec::new();
    let mut vectors = Vec::new();
    for (t, topic) in TOPICS.iter().enumerate() {
        for j in 0..4 {
            let mut words: Vec<&str> = topic.split(' ').collect();
            let shift = rng.random_range(0..words.len());
            words.rotate_left(shift);
            ids.push(format!("doc-{t}-{j}"));
            vectors.push(embedder.embed(&words.join(" ")));
        }
    }
    let config = KmeansConfig {
        k,
        seed: 23,
        ..KmeansConfig::default()
    };
    kmeans(&ids, &vectors, &config).unwrap()
}

/// Independent argmin over centroids, folding instead of tracking a best.
fn brute_force_node(model: &graphlab::ReasoningGraphModel, query: &str, embedder: &dyn Embedder) -> usize {
    let q: Vec<f64> = embedder.embed(query).iter().map(|&x| f64::from(x)).collect();
    let dist = |c: &Vec<f64>| -> f64 {
        q.iter()
            .zip(c)
            .fold(0.0, |acc, (x, y)| acc + (x - y) * (x - y))
    };
    (0..model.centroids.len())
        .map(|k| (k, dist(&model.centroids[k])))
        .fold((usize::MAX, f64::INFINITY), |best, (k, d)| {
            if d < best.1 {
                (k, d)
            } else {
                best
            }
        })
        .0
}

#[test]
fn mapped_nodes_match_the_brute_force_argmin() {
    let embedder = HashedBowEmbedder::new(64);
    let model = topic_model(&embedder, 6);
    let queries: Vec<String> = TOPICS
        .iter()
        .flat_map(|t| {
            [
                t.to_string(),
                format!("looking for {t}"),
                t.split(' ').rev().collect::<Vec<_>>().join(" "),
            ]
        })
        .collect();
    let calls: Vec<TraceCall> = queries
        .iter()
        .map(|q| TraceCall::new("search_information", Some(q)))
        .collect();
    let nodes = map_path(&calls, &model, &embedder).unwrap();
    for (query, &node) in queries.iter().zip(&nodes) {
        assert_eq!(node, brute_force_node(&model, query, &embedder), "query {query:?}");
    }
}

#[test]
fn next_page_inherits_and_think_is_skipped() {
    let embedder = HashedBowEmbedder::new(64);
    let model = topic_model(&embedder, 6);
    let calls = vec![
        TraceCall::new("search_information", Some(TOPICS[0])),
        TraceCall::new("next_page", None),
        TraceCall::new("think_tool", None),
        TraceCall::new("next_page", None),
        TraceCall::new("explore", Some(TOPICS[7])),
        TraceCall::new("revisit", Some(TOPICS[0])),
    ];
    let nodes = map_path(&calls, &model, &embedder).unwrap();
    assert_eq!(nodes.len(), 5); // think_tool contributes no node
    assert_eq!(nodes[0], nodes[1]);
    assert_eq!(nodes[1], nodes[2]);
    assert_eq!(nodes[0], brute_force_node(&model, TOPICS[0], &embedder));
    assert_eq!(nodes[3], brute_force_node(&model, TOPICS[7], &embedder));
    assert_eq!(nodes[4], nodes[0]);
}

#[test]
fn empty_traces_map_to_empty_paths() {
    let embedder = HashedBowEmbedder::new(64);
    let model = topic_model(&embedder, 6);
    assert_eq!(map_path(&[], &model, &embedder).unwrap(), Vec::<usize>::new());
}

#[test]
fn protocol_violations_are_errors() {
    let embedder = HashedBowEmbedder::new(64);
    let model = topic_model(&embedder, 6);

    let err = map_path(&[TraceCall::new("next_page", None)], &model, &embedder).unwrap_err();
    assert!(matches!(err, GraphError::NextPageFirst { index: 0 }));

    // think_tool before the first search does not create a predecessor.
    let err = map_path(
        &[
            TraceCall::new("think_tool", None),
            TraceCall::new("next_page", None),
        ],
        &model,
        &embedder,
    )
    .unwrap_err();
    assert!(matches!(err, GraphError::NextPageFirst { index: 1 }));

    let err = map_path(
        &[TraceCall::new("search_information", None)],
        &model,
        &embedder,
    )
    .unwrap_err();
    assert!(matches!(err, GraphError::MissingQuery { .. }));

    let err = map_path(
        &[TraceCall::new("summon_librarian", Some("x"))],
        &model,
        &embedder,
    )
    .unwrap_err();
    assert!(matches!(err, GraphError::UnknownTool { .. }));
}

/// Re-derive a label from prefix membership alone.
fn oracle_label(nodes: &[usize], t: usize) -> StepKind {
    let prefix = &nodes[..t];
    if !prefix.contains(&nodes[t]) {
        StepKind::Explore
    } else if prefix[prefix.len() - 1] == nodes[t] {
        StepKind::Exploit
    } else {
        StepKind::Revisit
    }
}

#[test]
fn classification_matches_the_oracle_for_every_short_path() {
    // All node sequences of length 1..=8 over 4 symbols: 87,380 paths.
    let mut checked = 0usize;
    for len in 1..=8usize {
        for code in 0..4usize.pow(len as u32) {
            let mut nodes = Vec::with_capacity(len);
            let mut c = code;
            for _ in 0..len {
                nodes.push(c % 4);
                c /= 4;
            }
            let got = classify_steps(&nodes);
            for t in 0..len {
                assert_eq!(got[t], oracle_label(&nodes, t), "path {nodes:?} step {t}");
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 87_380);
}

#[test]
fn bucketed_stats_match_a_filtering_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let paths: Vec<ReasoningPath> = (0..60)
        .map(|i| {
            let len = rng.random_range(1..=10);
            let width = rng.random_range(1..=4);
            let nodes: Vec<usize> = (0..len).map(|_| rng.random_range(0..width)).collect();
            ReasoningPath::from_nodes(format!("t{i}"), nodes)
        })
        .collect();
    let stats = trace_graph_stats(&paths);

    for (bucket, keep) in [
        (&stats.bucket_v2, 2usize..3),
        (&stats.bucket_v3_plus, 3..usize::MAX),
    ] {
        let members: Vec<&ReasoningPath> = paths
            .iter()
            .filter(|p| keep.contains(&p.unique_nodes()))
            .collect();
        assert_eq!(bucket.traces, members.len());
        if members.is_empty() {
            continue;
        }
        let v_mean: f64 = members.iter().map(|p| p.unique_nodes() as f64).sum::<f64>()
            / members.len() as f64;
        let has: f64 = members.iter().filter(|p| p.has_revisit()).count() as f64
            / members.len() as f64;
        assert!((bucket.v_mean - v_mean).abs() < 1e-12);
        assert!((bucket.has_rvst - has).abs() < 1e-12);
        let rs: Vec<_> = members
            .iter()
            .filter_map(|p| ratios(&p.step_kinds))
            .collect();
        let explore = rs.iter().map(|r| r.explore).sum::<f64>() / rs.len() as f64;
        assert!((bucket.explore - explore).abs() < 1e-12);
    }
}

fn count(kinds: &[StepKind], want: StepKind) -> usize {
    kinds.iter().filter(|&&k| k == want).count()
}

proptest! {
    /// The three kinds partition the steps, so the ratios always sum to 1.
    #[test]
    fn kinds_partition_and_ratios_sum_to_one(
        nodes in proptest::collection::vec(0usize..6, 1..40),
    ) {
        let kinds = classify_steps(&nodes);
        prop_assert_eq!(kinds.len(), nodes.len());
        let total = count(&kinds, StepKind::Explore)
            + count(&kinds, StepKind::Exploit)
            + count(&kinds, StepKind::Revisit);
        prop_assert_eq!(total, nodes.len());
        let r = ratios(&kinds).unwrap();
        prop_assert!((r.explore + r.exploit + r.revisit - 1.0).abs() < 1e-9);
    }

    /// All-distinct paths are pure exploration.
    #[test]
    fn distinct_paths_only_explore(len in 1usize..20) {
        let nodes: Vec<usize> = (0..len).collect();
        let kinds = classify_steps(&nodes);
        prop_assert!(kinds.iter().all(|&k| k == StepKind::Explore));
        let r = ratios(&kinds).unwrap();
        prop_assert_eq!(r.exploit, 0.0);
        prop_assert_eq!(r.revisit, 0.0);
    }
}

#[test]
fn constant_paths_after_one_search_stay_on_one_node() {
    let embedder = HashedBowEmbedder::new(64);
    let model = topic_model(&embedder, 6);
    let mut calls = vec![TraceCall::new("search_information", Some(TOPICS[3]))];
    for _ in 0..7 {
        calls.push(TraceCall::new("next_page", None));
    }
    let nodes = map_path(&calls, &model, &embedder).unwrap();
    assert_eq!(nodes.len(), 8);
    assert!(nodes.windows(2).all(|w| w[0] == w[1]));
}
