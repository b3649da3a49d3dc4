use rayon::prelude::*;

use super::components::{aggregate_ranges, raw_components};
use super::{
    validate_weights, Component, ComponentMatrices, DissimilarityConfig, DissimilarityError,
    DistanceMatrix, Scale,
};
use crate::dataset::Dataset;
use crate::hypergraph::{Hypergraph, VertexIx};
use crate::matrix::Matrix;
use crate::tree::NeighbourhoodTree;

/// Runs `f` on a dedicated pool of `workers` threads, or on the global
/// pool when `workers` is `None`.
pub fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, DissimilarityError> {
    match workers {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| DissimilarityError::Workers(e.to_string())),
    }
}

pub fn build_trees(
    graph: &Hypergraph,
    roots: &[VertexIx],
    depth: usize,
) -> Result<Vec<NeighbourhoodTree>, DissimilarityError> {
    roots
        .par_iter()
        .map(|&v| NeighbourhoodTree::build(graph, v, depth).map_err(Into::into))
        .collect()
}

fn raw_matrices(
    dataset: &Dataset,
    cfg: &DissimilarityConfig,
) -> Result<ComponentMatrices, DissimilarityError> {
    let targets = dataset.targets();
    let n = targets.len();
    if n < 2 {
        return Err(DissimilarityError::TooFewTargets(n));
    }
    let trees = build_trees(dataset.hypergraph(), &targets, cfg.depth)?;
    let ranges = aggregate_ranges(&trees);

    // Row i holds pairs (i, j) for j >= i; each cell is computed by exactly
    // one task with a fixed summation order.
    let rows: Vec<Vec<[f64; 5]>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| raw_components(&trees[i], &trees[j], &ranges, cfg))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut matrices: [Matrix; 5] = std::array::from_fn(|_| Matrix::zeros(n));
    for (i, row) in rows.iter().enumerate() {
        for (offset, values) in row.iter().enumerate() {
            let j = i + offset;
            for (m, &x) in matrices.iter_mut().zip(values) {
                m.set_sym(i, j, x);
            }
        }
    }
    Ok(ComponentMatrices {
        ids: dataset.target_ids(),
        matrices,
        scale: Scale::Raw,
    })
}

/// Divides each component by its maximum over distinct pairs; `cd` becomes
/// `1 − cd_raw / max`. A component that is zero on every pair maps to all
/// zeros, except `cd` which maps to all ones.
pub fn normalize_components(raw: &ComponentMatrices) -> ComponentMatrices {
    let matrices = std::array::from_fn(|c| {
        let m = &raw.matrices[c];
        let max = m.max_off_diagonal();
        let is_cd = c == Component::Cd.index();
        match (is_cd, max > 0.0) {
            (false, true) => m.map(|x| (x / max).min(1.0)),
            (false, false) => Matrix::zeros(m.dim()),
            (true, true) => m.map(|x| 1.0 - (x / max).min(1.0)),
            (true, false) => Matrix::filled(m.dim(), 1.0),
        }
    });
    ComponentMatrices {
        ids: raw.ids.clone(),
        matrices,
        scale: Scale::Normalized,
    }
}

/// Weighted sum of normalised components at `(i, j)`, clamped to `[0, 1]`.
#[inline]
pub fn combined_entry(norm: &ComponentMatrices, w: &[f64; 5], i: usize, j: usize) -> f64 {
    let mut s = 0.0;
    for (wc, m) in w.iter().zip(&norm.matrices) {
        s += wc * m.get(i, j);
    }
    s.clamp(0.0, 1.0)
}

/// Weighted sum of normalised components.
pub fn combine(
    norm: &ComponentMatrices,
    cfg: &DissimilarityConfig,
) -> Result<DistanceMatrix, DissimilarityError> {
    if norm.scale != Scale::Normalized {
        return Err(DissimilarityError::NotNormalized);
    }
    validate_weights(&cfg.weights)?;
    let w = cfg.weights;
    let n = norm.len();
    let values = Matrix::from_fn(n, |i, j| combined_entry(norm, &w, i, j));
    Ok(DistanceMatrix {
        ids: norm.ids.clone(),
        values,
        config: Some(cfg.clone()),
    })
}

#[derive(Debug, Clone)]
pub struct PairwiseOutput {
    pub distance: DistanceMatrix,
    pub normalized: ComponentMatrices,
    pub raw: ComponentMatrices,
}

/// Raw and normalised component matrices for all target pairs.
pub fn component_matrices(
    dataset: &Dataset,
    cfg: &DissimilarityConfig,
    workers: Option<usize>,
) -> Result<(ComponentMatrices, ComponentMatrices), DissimilarityError> {
    cfg.validate()?;
    let raw = with_workers(workers, || raw_matrices(dataset, cfg))??;
    let normalized = normalize_components(&raw);
    Ok((raw, normalized))
}

/// Full pipeline: trees, aggregate ranges, raw components for every pair,
/// normalisation, weighted combination. Output does not depend on the
/// number of workers.
pub fn pairwise_matrix(
    dataset: &Dataset,
    cfg: &DissimilarityConfig,
    workers: Option<usize>,
) -> Result<PairwiseOutput, DissimilarityError> {
    let (raw, normalized) = component_matrices(dataset, cfg, workers)?;
    let distance = combine(&normalized, cfg)?;
    Ok(PairwiseOutput {
        distance,
        normalized,
        raw,
    })
}
