//! Lloyd's K-means with k-means++ seeding, fully deterministic for a fixed
//! seed: serial accumulation, fixed iteration order, ties to lowest index.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{squared_distance, ReasoningGraphModel};
use crate::GraphError;

#[derive(Debug, Clone, Copy)]
pub struct KmeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Convergence threshold on the largest centroid movement (Euclidean).
    pub tol: f64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            k: 250,
            seed: 0,
            max_iters: 100,
            tol: 1e-6,
        }
    }
}

/// Cluster `vectors` (one per id) into `config.k` groups.
pub fn kmeans(
    ids: &[String],
    vectors: &[Vec<f32>],
    config: &KmeansConfig,
) -> Result<ReasoningGraphModel, GraphError> {
    kmeans_detailed(ids, vectors, config).map(|(model, _)| model)
}

/// Like [`kmeans`], also returning the inertia (within-cluster sum of
/// squared distances) recorded after each Lloyd iteration. The sequence is
/// non-increasing.
pub fn kmeans_detailed(
    ids: &[String],
    vectors: &[Vec<f32>],
    config: &KmeansConfig,
) -> Result<(ReasoningGraphModel, Vec<f64>), GraphError> {
    let points = validate(ids, vectors, config)?;
    let k = config.k;
    let n = points.len();

    let mut centroids = seed_centroids(&points, k, config.seed);
    let mut assignment = vec![0usize; n];
    let mut inertia_history = Vec::new();

    for _ in 0..config.max_iters {
        // Assignment: nearest centroid, ties to the lowest index.
        for (i, p) in points.iter().enumerate() {
            assignment[i] = nearest(p, &centroids);
        }

        // Refill empty clusters by reassigning, in ascending cluster order,
        // the point currently farthest from its own centroid (the centroid
        // will land exactly on it, so the move only lowers the objective).
        let mut counts = vec![0usize; k];
        for &a in &assignment {
            counts[a] += 1;
        }
        for empty in 0..k {
            if counts[empty] > 0 {
                continue;
            }
            let mut farthest: Option<(usize, f64)> = None;
            for (i, p) in points.iter().enumerate() {
                if counts[assignment[i]] < 2 {
                    continue; // stealing would just move the hole
                }
                let d2 = squared_distance(p, &centroids[assignment[i]]);
                if farthest.map_or(true, |(_, best)| d2 > best) {
                    farthest = Some((i, d2));
                }
            }
            if let Some((i, _)) = farthest {
                counts[assignment[i]] -= 1;
                assignment[i] = empty;
                counts[empty] = 1;
            }
        }

        // Update: serial mean per cluster in point order.
        let d = centroids[0].len();
        let mut sums = vec![vec![0.0f64; d]; k];
        for (i, p) in points.iter().enumerate() {
            let s = &mut sums[assignment[i]];
            for (acc, x) in s.iter_mut().zip(p) {
                *acc += x;
            }
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue; // unreached cluster keeps its centroid
            }
            let mut new_centroid = sums[c].clone();
            for x in &mut new_centroid {
                *x /= counts[c] as f64;
            }
            movement = movement.max(squared_distance(&new_centroid, &centroids[c]).sqrt());
            centroids[c] = new_centroid;
        }

        let inertia: f64 = points
            .iter()
            .zip(&assignment)
            .map(|(p, &a)| squared_distance(p, &centroids[a]))
            .sum();
        inertia_history.push(inertia);

        if movement < config.tol {
            break;
        }
    }

    // Final certificate pass: every point to its nearest final centroid.
    let assignment: BTreeMap<String, usize> = ids
        .iter()
        .zip(&points)
        .map(|(id, p)| (id.clone(), nearest(p, &centroids)))
        .collect();

    let model = ReasoningGraphModel {
        k,
        centroids,
        assignment,
    };
    model.validate()?;
    Ok((model, inertia_history))
}

fn validate(
    ids: &[String],
    vectors: &[Vec<f32>],
    config: &KmeansConfig,
) -> Result<Vec<Vec<f64>>, GraphError> {
    if config.k == 0 {
        return Err(GraphError::ZeroK);
    }
    if ids.len() != vectors.len() {
        return Err(GraphError::LengthMismatch {
            ids: ids.len(),
            vectors: vectors.len(),
        });
    }
    if vectors.len() < config.k {
        return Err(GraphError::TooFewPoints {
            points: vectors.len(),
            k: config.k,
        });
    }
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(GraphError::DuplicateId(id.clone()));
        }
    }
    let expected = vectors[0].len();
    let mut points = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != expected {
            return Err(GraphError::DimensionMismatch {
                index,
                found: v.len(),
                expected,
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GraphError::NonFiniteInput { index });
        }
        points.push(v.iter().map(|&x| x as f64).collect());
    }
    Ok(points)
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0usize;
    let mut best_d2 = f64::INFINITY;
    for (k, c) in centroids.iter().enumerate() {
        let d2 = squared_distance(point, c);
        if d2 < best_d2 {
            best_d2 = d2;
            best = k;
        }
    }
    best
}

/// k-means++: first center uniform, each further center sampled with
/// probability proportional to its squared distance from the chosen set.
fn seed_centroids(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let mut chosen_idx = Vec::with_capacity(k);
    let first = rng.random_range(0..n);
    chosen_idx.push(first);

    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &points[first]))
        .collect();

    while chosen_idx.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let r = rng.random_range(0.0..total);
            let mut cum = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                cum += w;
                if r < cum {
                    pick = Some(i);
                    break;
                }
            }
            // Float roundoff can leave r at the very top; take the last
            // positive-weight point then.
            pick.unwrap_or_else(|| {
                d2.iter().rposition(|&w| w > 0.0).expect("total > 0")
            })
        } else {
            // All remaining points coincide with chosen centers; take the
            // lowest unchosen index to keep K centers.
            (0..n)
                .find(|i| !chosen_idx.contains(i))
                .expect("k <= n leaves an unchosen point")
        };
        chosen_idx.push(next);
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p, &points[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    chosen_idx.into_iter().map(|i| points[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("d{i}")).collect()
    }

    #[test]
    fn k_equal_to_point_count_gives_zero_inertia() {
        let vectors: Vec<Vec<f32>> = vec![
            vec![0.0, 0.0],
            vec![5.0, 0.0],
            vec![0.0, 5.0],
            vec![5.0, 5.0],
        ];
        let config = KmeansConfig {
            k: 4,
            ..KmeansConfig::default()
        };
        let (model, history) = kmeans_detailed(&ids(4), &vectors, &config).unwrap();
        assert_eq!(*history.last().unwrap(), 0.0);
        // Each point sits exactly on a centroid.
        for (i, v) in vectors.iter().enumerate() {
            let p: Vec<f64> = v.iter().map(|&x| x as f64).collect();
            let c = &model.centroids[model.assignment[&format!("d{i}")]];
            assert_eq!(&p, c);
        }
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let config = KmeansConfig {
            k: 3,
            ..KmeansConfig::default()
        };
        let err = kmeans(&ids(2), &[vec![0.0], vec![1.0]], &config).unwrap_err();
        assert!(matches!(err, GraphError::TooFewPoints { points: 2, k: 3 }));
        assert!(err.to_string().contains("smaller K"));

        let err = kmeans(
            &ids(3),
            &[vec![0.0], vec![1.0, 2.0], vec![1.0]],
            &KmeansConfig {
                k: 1,
                ..KmeansConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::DimensionMismatch { index: 1, .. }));

        let err = kmeans(
            &["a".to_string(), "a".to_string()],
            &[vec![0.0], vec![1.0]],
            &KmeansConfig {
                k: 1,
                ..KmeansConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::DuplicateId(_)));

        let err = kmeans(
            &ids(1),
            &[vec![f32::NAN]],
            &KmeansConfig {
                k: 1,
                ..KmeansConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::NonFiniteInput { index: 0 }));

        let err = kmeans(
            &ids(1),
            &[vec![1.0]],
            &KmeansConfig {
                k: 0,
                ..KmeansConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::ZeroK));
    }

    #[test]
    fn duplicate_points_with_k_equal_n_still_yield_k_centroids() {
        let vectors: Vec<Vec<f32>> = vec![vec![1.0, 1.0]; 3];
        let config = KmeansConfig {
            k: 3,
            ..KmeansConfig::default()
        };
        let (model, history) = kmeans_detailed(&ids(3), &vectors, &config).unwrap();
        assert_eq!(model.centroids.len(), 3);
        assert_eq!(*history.last().unwrap(), 0.0);
    }
}
