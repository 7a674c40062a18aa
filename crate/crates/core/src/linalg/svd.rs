//! One-sided Jacobi SVD for small dense matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm2};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::Scalar;

/// Largest dimension accepted by [`svd_summary`].
pub const SVD_DIM_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary<T> {
    pub rank: usize,
    /// Nonincreasing, strictly positive.
    pub singular_values: Vec<T>,
    /// Orthonormal basis of ker(A), one vector per entry.
    pub kernel_basis_cols: Vec<Vec<T>>,
    /// Orthonormal basis of ker(Aᵀ).
    pub kernel_basis_rows: Vec<Vec<T>>,
}

/// Rank, singular values and kernel bases of `A` and `Aᵀ`.
pub fn svd_summary<T: Scalar>(a: &SparseMatrix<T>) -> Result<SpectralSummary<T>> {
    let (m, n) = (a.n_rows(), a.n_cols());
    if m > SVD_DIM_LIMIT || n > SVD_DIM_LIMIT {
        return Err(Error::TooLarge { rows: m, cols: n, limit: SVD_DIM_LIMIT });
    }
    let dense = a.to_dense();
    let (sv, v) = right_singular(&dense);
    let (_, u) = right_singular(&dense.transpose());
    let top = sv.first().copied().unwrap_or_else(T::zero);
    let thresh = T::of(1e-10) * top;
    let rank = sv.iter().filter(|&&s| top > T::zero() && s > thresh).count();
    Ok(SpectralSummary {
        rank,
        singular_values: sv[..rank].to_vec(),
        kernel_basis_cols: v[rank..].to_vec(),
        kernel_basis_rows: u[rank..].to_vec(),
    })
}

/// Singular values (descending, length `cols`) and matching right singular
/// vectors of `a`.
fn right_singular<T: Scalar>(a: &DenseMatrix<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = a.cols();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(w.col(p), w.col(p));
                let beta = dot(w.col(q), w.col(q));
                let gamma = dot(w.col(p), w.col(q));
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::two() * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(T, usize)> = (0..n).map(|j| (norm2(w.col(j)), j)).collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite singular values"));
    let values = order.iter().map(|o| o.0).collect();
    let vectors = order.iter().map(|o| v.col(o.1).to_vec()).collect();
    (values, vectors)
}

fn rotate<T: Scalar>(m: &mut DenseMatrix<T>, p: usize, q: usize, c: T, s: T) {
    for i in 0..m.rows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}
