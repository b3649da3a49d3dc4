//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use crate::matrix::Matrix;

/// Off-diagonal Frobenius norm at which iteration stops.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, i: usize) -> Vec<f64> {
        (0..self.vectors.dim())
            .map(|r| self.vectors.get(r, i))
            .collect()
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a.get(i, j) * a.get(i, j);
            }
        }
    }
    s.sqrt()
}

/// Diagonalises symmetric `a` by cyclic row-order Jacobi rotations until the
/// off-diagonal norm drops below `tol`. Eigenpairs are returned sorted by
/// eigenvalue (stable on ties), each eigenvector signed so its
/// largest-magnitude entry is positive.
pub fn symmetric_eigen(a: &Matrix, tol: f64) -> SymmetricEigen {
    let n = a.dim();
    let mut a = a.clone();
    let mut v = Matrix::identity(n);
    let mut sweeps = 0;

    while sweeps < MAX_SWEEPS && off_diagonal_norm(&a) > tol {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    // |apq| negligible relative to the diagonal gap
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a.get(k, p), a.get(k, q));
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (a.get(p, k), a.get(q, k));
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for r in 0..n {
            if v.get(r, src).abs() > v.get(pivot, src).abs() {
                pivot = r;
            }
        }
        let sign = if v.get(pivot, src) < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors.set(r, col, sign * v.get(r, src));
        }
    }
    SymmetricEigen {
        values,
        vectors,
        sweeps,
    }
}
