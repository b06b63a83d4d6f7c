//! Cyclic Jacobi eigensolver for small symmetric matrices.

use ndarray::{Array1, Array2};

use crate::error::{Result, ZennError};

/// Convergence threshold on the off-diagonal Frobenius norm, relative to
/// `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;

/// Tolerance on `|a_ij - a_ji|`, relative to `max(1, |a_ij|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Largest relative asymmetry of a square matrix.
pub fn asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let scale = a[[i, j]].abs().max(a[[j, i]].abs()).max(1.0);
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs() / scale);
        }
    }
    worst
}

fn off_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[[i, j]] * a[[i, j]];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Array1<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Array2<f64>,
    pub sweeps: usize,
}

/// Diagonalizes `a` by cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(ZennError::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n == 0 {
        return Err(ZennError::Empty("matrix"));
    }
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOLERANCE {
        return Err(ZennError::NotSymmetric(asym));
    }
    let mut m = a.clone();
    // Work on the exactly symmetric part.
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[[i, j]] + m[[j, i]]);
            m[[i, j]] = v;
            m[[j, i]] = v;
        }
    }
    let mut v = Array2::eye(n);
    let target = JACOBI_TOLERANCE * m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let mut sweeps = 0;
    while off_norm(&m) > target {
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[[k, p]], m[[k, q]]);
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[[p, k]], m[[q, k]]);
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| v[[r, order[c]]]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn smallest_eigenvalue(a: &Array2<f64>) -> Result<f64> {
    Ok(symmetric_eigen(a)?.values[0])
}
