//! Scoring clusterings and classifying with the dissimilarity.

mod ari;
mod knn;
mod tune;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ari::{adjusted_rand_index, ari};
pub use knn::{knn_classify, knn_predict};
pub use tune::{
    cross_validate, stratified_folds, tune_weights, tune_weights_observed, weight_grid,
    FoldOutcome, LabelObserver, LabelRead, Stage, TuneOptions, TuneOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluationError {
    #[error("ids do not match: {0}")]
    IdMismatch(String),
    #[error("training set is empty")]
    EmptyTrain,
    #[error("k must be >= 1")]
    BadK,
    #[error("labels are required; unlabeled target `{0}`")]
    MissingLabels(String),
    #[error("invalid weight grid: {0}")]
    BadGrid(String),
    #[error("need at least 2 folds, got {0}")]
    BadFolds(usize),
    #[error(transparent)]
    Dissimilarity(#[from] crate::dissimilarity::DissimilarityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Clustering,
    Classification,
}

/// Machine-readable summary written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub task: Task,
    /// `ari` for clustering, `accuracy` (percent) for classification.
    pub metric: String,
    pub values: Vec<f64>,
    pub mean: Option<f64>,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub selected_weights: Vec<[f64; 5]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_weights: Option<[f64; 5]>,
    pub wall_clock_seconds: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EvaluationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub(crate) fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}
