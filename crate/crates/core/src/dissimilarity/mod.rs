//! The five-component neighbourhood-tree dissimilarity.
//!
//! For two target vertices with trees `g` and `h` the components are
//!
//! * `ad`  – distance between the roots' own attribute values,
//! * `nad` – distances between neighbour attribute values, per level, type
//!   and attribute,
//! * `cd`  – one minus the normalised number of hyperedges linking the roots,
//! * `nd`  – χ² between neighbour identity multisets, per level and type,
//! * `ed`  – χ² between edge-label multisets, per level.
//!
//! Each component is scaled by its maximum over all distinct target pairs
//! and the final distance is the weighted sum with weights summing to one.

mod components;
mod distribution;
mod pairwise;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

pub use components::{aggregate_ranges, raw_components, AttributeRanges};
pub use distribution::{chi2_distance, continuous_distance, Aggregate, AggregateRange};
pub use pairwise::{
    build_trees, combine, combined_entry, component_matrices, normalize_components,
    pairwise_matrix, with_workers, PairwiseOutput,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DissimilarityError {
    #[error("weights must sum to 1 (got {sum})")]
    WeightSumInvalid { sum: f64 },
    #[error("weights must be finite and non-negative (got {0:?})")]
    InvalidWeight([f64; 5]),
    #[error("depth must be >= 1, got {0}")]
    InvalidDepth(usize),
    #[error("at least one aggregate function is required")]
    NoAggregates,
    #[error("tree depth {tree} does not match configured depth {config}")]
    DepthMismatch { tree: usize, config: usize },
    #[error("need at least 2 target vertices, found {0}")]
    TooFewTargets(usize),
    #[error("component matrices must be normalized before combining")]
    NotNormalized,
    #[error("worker pool: {0}")]
    Workers(String),
    #[error(transparent)]
    Tree(#[from] crate::tree::TreeError),
}

/// The five dissimilarity sources, in weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Ad,
    Nad,
    Cd,
    Nd,
    Ed,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Ad,
        Component::Nad,
        Component::Cd,
        Component::Nd,
        Component::Ed,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Ad => "ad",
            Component::Nad => "nad",
            Component::Cd => "cd",
            Component::Nd => "nd",
            Component::Ed => "ed",
        }
    }
}

/// Tolerance on `Σ w = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissimilarityConfig {
    /// `w1..w5` for ad, nad, cd, nd, ed.
    pub weights: [f64; 5],
    pub depth: usize,
    pub aggregates: Vec<Aggregate>,
}

impl Default for DissimilarityConfig {
    fn default() -> Self {
        Self {
            weights: [0.2; 5],
            depth: 1,
            aggregates: Aggregate::ALL.to_vec(),
        }
    }
}

impl DissimilarityConfig {
    pub fn with_weights(weights: [f64; 5]) -> Self {
        Self {
            weights,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), DissimilarityError> {
        validate_weights(&self.weights)?;
        if self.depth < 1 {
            return Err(DissimilarityError::InvalidDepth(self.depth));
        }
        if self.aggregates.is_empty() {
            return Err(DissimilarityError::NoAggregates);
        }
        Ok(())
    }
}

pub fn validate_weights(w: &[f64; 5]) -> Result<(), DissimilarityError> {
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(DissimilarityError::InvalidWeight(*w));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(DissimilarityError::WeightSumInvalid { sum });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Raw,
    Normalized,
}

/// Per-component `N × N` matrices over the target vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMatrices {
    pub ids: Vec<String>,
    pub matrices: [Matrix; 5],
    pub scale: Scale,
}

impl ComponentMatrices {
    pub fn get(&self, c: Component) -> &Matrix {
        &self.matrices[c.index()]
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Symmetric target-by-target distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub ids: Vec<String>,
    pub values: Matrix,
    /// Configuration the matrix was computed with, when known.
    pub config: Option<DissimilarityConfig>,
}

impl DistanceMatrix {
    pub fn new(ids: Vec<String>, values: Matrix) -> Self {
        Self {
            ids,
            values,
            config: None,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }
}
