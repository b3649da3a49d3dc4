use std::collections::BTreeMap;

use thiserror::Error;

use crate::hypergraph::{Hypergraph, VertexIx, VertexTypeIx};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("target type `{0}` is not declared")]
    UnknownTargetType(String),
    #[error("labeled vertex `{0}` is not a vertex of the target type")]
    LabelNotTarget(String),
}

/// A hypergraph together with the vertex type whose vertices are compared,
/// and optional class labels for those vertices.
#[derive(Debug, Clone)]
pub struct Dataset {
    hypergraph: Hypergraph,
    target_type: VertexTypeIx,
    labels: BTreeMap<String, String>,
}

impl Dataset {
    pub fn new(
        hypergraph: Hypergraph,
        target_type: &str,
        labels: BTreeMap<String, String>,
    ) -> Result<Self, DatasetError> {
        let t = hypergraph
            .vertex_type_ix(target_type)
            .ok_or_else(|| DatasetError::UnknownTargetType(target_type.to_owned()))?;
        for id in labels.keys() {
            match hypergraph.vertex_ix(id) {
                Some(v) if hypergraph.vertex(v).ty == t => {}
                _ => return Err(DatasetError::LabelNotTarget(id.clone())),
            }
        }
        Ok(Self {
            hypergraph,
            target_type: t,
            labels,
        })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn target_type(&self) -> VertexTypeIx {
        self.target_type
    }

    pub fn target_type_name(&self) -> &str {
        &self.hypergraph.vertex_type(self.target_type).name
    }

    /// Target vertices in vertex-index order. This order defines matrix rows.
    pub fn targets(&self) -> Vec<VertexIx> {
        self.hypergraph.vertices_of_type(self.target_type).collect()
    }

    pub fn target_ids(&self) -> Vec<String> {
        self.targets()
            .into_iter()
            .map(|v| self.hypergraph.vertex(v).id.clone())
            .collect()
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    pub fn has_labels(&self) -> bool {
        !self.labels.is_empty()
    }

    /// Labels aligned with [`Self::targets`], or the first unlabeled id.
    pub fn target_labels(&self) -> Result<Vec<String>, String> {
        self.target_ids()
            .into_iter()
            .map(|id| self.labels.get(&id).cloned().ok_or(id))
            .collect()
    }
}
