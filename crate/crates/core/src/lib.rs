//! Relational dissimilarity over neighbourhood trees of typed, oriented
//! hypergraphs, with distance-matrix clustering and kNN evaluation.
//!
//! Typical flow: [`ingest::parse_dataset`] → [`dissimilarity::pairwise_matrix`]
//! → [`clustering::agglomerative`] or [`clustering::spectral`] →
//! [`evaluation::ari`].

pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod dissimilarity;
pub mod evaluation;
pub mod hypergraph;
pub mod ingest;
pub mod matrix;
pub mod multiset;
pub mod synth;
pub mod tree;

pub use clustering::{ClusterAssignment, ClusterError};
pub use dataset::Dataset;
pub use dissimilarity::{
    pairwise_matrix, ComponentMatrices, DissimilarityConfig, DissimilarityError, DistanceMatrix,
};
pub use hypergraph::{Hypergraph, HypergraphError};
pub use ingest::{parse_dataset, IngestError};
pub use matrix::Matrix;
pub use tree::{NeighbourhoodTree, TreeError};
