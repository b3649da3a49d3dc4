//! Clustering from a precomputed distance matrix.

mod agglomerative;
pub mod jacobi;
pub mod kmeans;
mod spectral;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use agglomerative::{agglomerative, agglomerative_merges, Linkage, Merge};
pub use spectral::{
    affinity_matrix, normalized_laplacian, spectral, Affinity, SpectralOutcome, SpectralParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("k must be in 1..={n}, got {k}")]
    BadK { k: usize, n: usize },
    #[error("distance matrix is not symmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("distance at ({i}, {j}) must be finite and non-negative")]
    InvalidDistance { i: usize, j: usize },
    #[error("gaussian affinity needs sigma > 0, got {0}")]
    InvalidSigma(f64),
    #[error("kmeans_restarts must be >= 1")]
    NoRestarts,
}

/// Cluster index per id. Indices are numbered by first appearance, so two
/// assignments describing the same partition compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    pub k: usize,
}

impl ClusterAssignment {
    pub fn new(ids: Vec<String>, raw_labels: &[usize]) -> Self {
        let labels = canonical_labels(raw_labels);
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Self { ids, labels, k }
    }

    pub fn cluster_count(&self) -> usize {
        self.k
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Renumbers labels `0, 1, …` in order of first appearance.
pub fn canonical_labels<T: Eq + std::hash::Hash + Clone>(raw: &[T]) -> Vec<usize> {
    let mut seen = std::collections::HashMap::new();
    raw.iter()
        .map(|l| {
            let next = seen.len();
            *seen.entry(l.clone()).or_insert(next)
        })
        .collect()
}

pub(crate) fn check_distances(m: &crate::matrix::Matrix) -> Result<(), ClusterError> {
    let n = m.dim();
    for i in 0..n {
        for j in i..n {
            let x = m.get(i, j);
            if !x.is_finite() || x < 0.0 {
                return Err(ClusterError::InvalidDistance { i, j });
            }
            if x != m.get(j, i) {
                return Err(ClusterError::AsymmetricMatrix { i, j });
            }
        }
    }
    Ok(())
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<(), ClusterError> {
    if k == 0 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_relabeling() {
        assert_eq!(canonical_labels(&[7, 7, 3, 9, 3]), vec![0, 0, 1, 2, 1]);
        let a = ClusterAssignment::new(vec!["a".into(), "b".into(), "c".into()], &[5, 2, 5]);
        let b = ClusterAssignment::new(vec!["a".into(), "b".into(), "c".into()], &[0, 1, 0]);
        assert_eq!(a, b);
        assert_eq!(a.sizes(), vec![2, 1]);
    }
}
