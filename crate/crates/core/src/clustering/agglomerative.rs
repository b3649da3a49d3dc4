use serde::{Deserialize, Serialize};

use super::{check_distances, check_k, ClusterAssignment, ClusterError};
use crate::dissimilarity::DistanceMatrix;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

impl Linkage {
    /// Lance–Williams update for the distance between the union of clusters
    /// `a` (size `na`) and `b` (size `nb`) and a third cluster.
    #[inline]
    fn update(self, d_ax: f64, d_bx: f64, na: usize, nb: usize) -> f64 {
        match self {
            Linkage::Single => d_ax.min(d_bx),
            Linkage::Complete => d_ax.max(d_bx),
            Linkage::Average => (na as f64 * d_ax + nb as f64 * d_bx) / (na + nb) as f64,
        }
    }
}

/// One merge step. Clusters are named by their smallest member's row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

const NONE: usize = usize::MAX;

struct Work {
    d: Matrix,
    active: Vec<bool>,
    size: Vec<usize>,
    /// Per active row `i`: `(min_j d(i, j), j)` over active `j > i`,
    /// smallest `j` on ties.
    row_min: Vec<(f64, usize)>,
}

impl Work {
    fn recompute(&mut self, i: usize) {
        let mut best = (f64::INFINITY, NONE);
        for j in i + 1..self.active.len() {
            if self.active[j] {
                let x = self.d.get(i, j);
                if x < best.0 {
                    best = (x, j);
                }
            }
        }
        self.row_min[i] = best;
    }
}

/// Merges clusters until `k` remain. Returns the merges in order and the
/// final cluster slot of every row.
fn run(m: &Matrix, k: usize, linkage: Linkage) -> (Vec<Merge>, Vec<usize>) {
    let n = m.dim();
    let mut w = Work {
        d: m.clone(),
        active: vec![true; n],
        size: vec![1; n],
        row_min: vec![(f64::INFINITY, NONE); n],
    };
    for i in 0..n {
        w.recompute(i);
    }
    let mut owner: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n.saturating_sub(k));

    for _ in 0..n.saturating_sub(k) {
        // lexicographically smallest (i, j) among minimal distances
        let mut pick = (f64::INFINITY, NONE, NONE);
        for i in 0..n {
            if w.active[i] && w.row_min[i].1 != NONE && w.row_min[i].0 < pick.0 {
                pick = (w.row_min[i].0, i, w.row_min[i].1);
            }
        }
        let (dist, a, b) = pick;
        debug_assert!(a != NONE);

        let (na, nb) = (w.size[a], w.size[b]);
        for x in 0..n {
            if x == a || x == b || !w.active[x] {
                continue;
            }
            let v = linkage.update(w.d.get(a, x), w.d.get(b, x), na, nb);
            w.d.set_sym(a, x, v);
        }
        w.active[b] = false;
        w.size[a] = na + nb;
        for o in owner.iter_mut() {
            if *o == b {
                *o = a;
            }
        }
        merges.push(Merge {
            left: a,
            right: b,
            distance: dist,
            size: na + nb,
        });

        w.recompute(a);
        for r in 0..b {
            if !w.active[r] || r == a {
                continue;
            }
            let (cur, arg) = w.row_min[r];
            if arg == a || arg == b {
                w.recompute(r);
            } else if r < a {
                let v = w.d.get(r, a);
                if v < cur || (v == cur && a < arg) {
                    w.row_min[r] = (v, a);
                }
            }
        }
    }
    (merges, owner)
}

fn validated(m: &DistanceMatrix, k: usize) -> Result<(), ClusterError> {
    check_k(k, m.len())?;
    check_distances(&m.values)
}

/// Agglomerative clustering cut at `k` clusters. Ties between equal
/// distances go to the smallest `(i, j)` row pair.
pub fn agglomerative(
    m: &DistanceMatrix,
    k: usize,
    linkage: Linkage,
) -> Result<ClusterAssignment, ClusterError> {
    validated(m, k)?;
    let (_, owner) = run(&m.values, k, linkage);
    Ok(ClusterAssignment::new(m.ids.clone(), &owner))
}

/// Full merge sequence down to a single cluster.
pub fn agglomerative_merges(
    m: &DistanceMatrix,
    linkage: Linkage,
) -> Result<Vec<Merge>, ClusterError> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    validated(m, 1)?;
    Ok(run(&m.values, 1, linkage).0)
}
