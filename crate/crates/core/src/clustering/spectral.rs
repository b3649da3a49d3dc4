use serde::{Deserialize, Serialize};

use super::jacobi::{symmetric_eigen, DEFAULT_TOLERANCE};
use super::kmeans::kmeans;
use super::{check_distances, check_k, ClusterAssignment, ClusterError};
use crate::dissimilarity::DistanceMatrix;
use crate::matrix::Matrix;

/// Self-affinity given to rows with zero degree.
pub const ISOLATED_SELF_AFFINITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Affinity {
    /// `1 − d / max(d)`.
    OneMinus,
    /// `exp(−d² / 2σ²)`.
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub affinity: Affinity,
    pub kmeans_restarts: usize,
    pub seed: u64,
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self {
            affinity: Affinity::OneMinus,
            kmeans_restarts: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralOutcome {
    pub assignment: ClusterAssignment,
    /// The `k` smallest eigenvalues of the normalised Laplacian.
    pub eigenvalues: Vec<f64>,
    pub inertia: f64,
    pub warnings: Vec<String>,
}

/// Affinity with zero diagonal.
pub fn affinity_matrix(m: &Matrix, affinity: Affinity) -> Matrix {
    let n = m.dim();
    match affinity {
        Affinity::OneMinus => {
            let max = m.max_off_diagonal();
            Matrix::from_fn(n, |i, j| {
                if i == j {
                    0.0
                } else if max > 0.0 {
                    1.0 - m.get(i, j) / max
                } else {
                    1.0
                }
            })
        }
        Affinity::Gaussian { sigma } => Matrix::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else {
                let d = m.get(i, j);
                (-d * d / (2.0 * sigma * sigma)).exp()
            }
        }),
    }
}

/// `I − D^{-1/2} W D^{-1/2}`. Zero-degree rows receive a tiny self-affinity
/// first; their row indices are returned.
pub fn normalized_laplacian(w: &Matrix) -> (Matrix, Vec<usize>) {
    let n = w.dim();
    let mut w = w.clone();
    let mut isolated = Vec::new();
    let mut inv_sqrt = vec![0.0; n];
    for (i, inv) in inv_sqrt.iter_mut().enumerate() {
        let mut deg: f64 = w.row(i).iter().sum();
        if deg <= 0.0 {
            w.set(i, i, ISOLATED_SELF_AFFINITY);
            deg = ISOLATED_SELF_AFFINITY;
            isolated.push(i);
        }
        *inv = 1.0 / deg.sqrt();
    }
    let l = Matrix::from_fn(n, |i, j| {
        let off = w.get(i, j) * inv_sqrt[i] * inv_sqrt[j];
        if i == j {
            1.0 - off
        } else {
            -off
        }
    });
    (l, isolated)
}

/// Normalised spectral clustering: embed rows with the eigenvectors of the
/// `k` smallest Laplacian eigenvalues, scale rows to unit length, then run
/// seeded k-means.
pub fn spectral(
    m: &DistanceMatrix,
    k: usize,
    params: &SpectralParams,
) -> Result<SpectralOutcome, ClusterError> {
    let n = m.len();
    check_k(k, n)?;
    check_distances(&m.values)?;
    if let Affinity::Gaussian { sigma } = params.affinity {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ClusterError::InvalidSigma(sigma));
        }
    }
    if params.kmeans_restarts == 0 {
        return Err(ClusterError::NoRestarts);
    }

    let w = affinity_matrix(&m.values, params.affinity);
    let (laplacian, isolated) = normalized_laplacian(&w);
    let warnings = isolated
        .iter()
        .map(|&i| format!("vertex `{}` has zero affinity to all others", m.ids[i]))
        .collect();

    let eig = symmetric_eigen(&laplacian, DEFAULT_TOLERANCE);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..k).map(|c| eig.vectors.get(i, c)).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect();
    let result = kmeans(&points, k, params.kmeans_restarts, params.seed);

    Ok(SpectralOutcome {
        assignment: ClusterAssignment::new(m.ids.clone(), &result.labels),
        eigenvalues: eig.values[..k].to_vec(),
        inertia: result.inertia,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn recovers_disconnected_blocks() {
        // distance 0.2 within interleaved blocks {even}, {odd}; 1.0 across
        let n = 10;
        let m = Matrix::from_fn(n, |i, j| {
            if i == j {
                0.0
            } else if i % 2 == j % 2 {
                0.2
            } else {
                1.0
            }
        });
        let out = spectral(
            &DistanceMatrix::new(ids(n), m),
            2,
            &SpectralParams::default(),
        )
        .unwrap();
        let expected: Vec<usize> = (0..n).map(|i| i % 2).collect();
        assert_eq!(out.assignment.labels, expected);
        assert!(out.eigenvalues.iter().all(|l| l.abs() < 1e-9));
    }

    #[test]
    fn zero_eigenvector_is_sqrt_degree() {
        let m = Matrix::from_rows(vec![
            vec![0.0, 0.3, 0.9, 0.5],
            vec![0.3, 0.0, 0.4, 0.8],
            vec![0.9, 0.4, 0.0, 0.2],
            vec![0.5, 0.8, 0.2, 0.0],
        ])
        .unwrap();
        let w = affinity_matrix(&m, Affinity::Gaussian { sigma: 0.5 });
        let (l, isolated) = normalized_laplacian(&w);
        assert!(isolated.is_empty());
        let sqrt_deg: Vec<f64> = (0..4)
            .map(|i| w.row(i).iter().sum::<f64>().sqrt())
            .collect();
        for i in 0..4 {
            let lx: f64 = (0..4).map(|j| l.get(i, j) * sqrt_deg[j]).sum();
            assert!(lx.abs() < 1e-12);
        }
        let eig = symmetric_eigen(&l, DEFAULT_TOLERANCE);
        assert!(eig.values[0].abs() < 1e-10);
        let norm = sqrt_deg.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (i, x) in eig.vector(0).iter().enumerate() {
            assert!((x - sqrt_deg[i] / norm).abs() < 1e-8);
        }
    }

    #[test]
    fn isolated_rows_warn() {
        // vertex 2 is at the maximum distance from everyone
        let m = Matrix::from_rows(vec![
            vec![0.0, 0.5, 1.0],
            vec![0.5, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let out = spectral(
            &DistanceMatrix::new(ids(3), m),
            2,
            &SpectralParams::default(),
        )
        .unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.assignment.labels, vec![0, 0, 1]);
    }

    #[test]
    fn singletons_when_k_is_n() {
        let m = Matrix::from_fn(5, |i, j| (i as f64 - j as f64).abs() / 4.0);
        let out = spectral(
            &DistanceMatrix::new(ids(5), m),
            5,
            &SpectralParams::default(),
        )
        .unwrap();
        assert_eq!(out.assignment.labels, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn parameter_errors() {
        let m = DistanceMatrix::new(ids(2), Matrix::zeros(2));
        assert_eq!(
            spectral(&m, 3, &SpectralParams::default()).unwrap_err(),
            ClusterError::BadK { k: 3, n: 2 }
        );
        let p = SpectralParams {
            affinity: Affinity::Gaussian { sigma: 0.0 },
            ..Default::default()
        };
        assert_eq!(
            spectral(&m, 1, &p).unwrap_err(),
            ClusterError::InvalidSigma(0.0)
        );
    }
}
