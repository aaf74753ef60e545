//! The clustered document graph: centroids plus a document→cluster map.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::GraphError;

/// K-means model over document embeddings. Cluster indices are the graph's
/// nodes; every document is assigned to its nearest centroid (ties to the
/// lowest index) and all centroid coordinates are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReasoningGraphModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignment: BTreeMap<String, usize>,
}

impl ReasoningGraphModel {
    pub fn dimension(&self) -> usize {
        self.centroids.first().map_or(0, Vec::len)
    }

    /// Index of the nearest centroid in Euclidean distance; ties go to the
    /// lowest cluster index.
    pub fn nearest_cluster(&self, vector: &[f64]) -> usize {
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for (k, centroid) in self.centroids.iter().enumerate() {
            let d2 = squared_distance(vector, centroid);
            if d2 < best_d2 {
                best_d2 = d2;
                best = k;
            }
        }
        best
    }

    pub fn save(&self, path: &Path) -> Result<(), GraphError> {
        let file = File::create(path).map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::to_writer(BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        let file = File::open(path).map_err(|e| GraphError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let model: Self = serde_json::from_reader(BufReader::new(file))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        if self.centroids.len() != self.k {
            return Err(GraphError::CorruptModel(format!(
                "{} centroids for K = {}",
                self.centroids.len(),
                self.k
            )));
        }
        let d = self.dimension();
        for (i, c) in self.centroids.iter().enumerate() {
            if c.len() != d {
                return Err(GraphError::CorruptModel(format!(
                    "centroid {i} has dimension {}, expected {d}",
                    c.len()
                )));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(GraphError::CorruptModel(format!(
                    "centroid {i} has a non-finite coordinate"
                )));
            }
        }
        if let Some((doc_id, &cluster)) =
            self.assignment.iter().find(|(_, &c)| c >= self.k)
        {
            return Err(GraphError::CorruptModel(format!(
                "document `{doc_id}` assigned to cluster {cluster} but K = {}",
                self.k
            )));
        }
        Ok(())
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}
