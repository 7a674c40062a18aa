use crate::error::{Error, Result};
use crate::linalg::vector::norm2;
use crate::linalg::SparseMatrix;
use crate::Scalar;

pub const POWER_MAX_ITER: usize = 5000;

/// Estimates ‖A‖₂ by power iteration on AᵀA from the normalized all-ones
/// vector. Returns 0 for the zero matrix.
pub fn spectral_norm_estimate<T: Scalar>(a: &SparseMatrix<T>, tol: T) -> Result<T> {
    let n = a.n_cols();
    if a.is_zero() || n == 0 {
        return Ok(T::zero());
    }
    let start = vec![T::one() / T::of(n as f64).sqrt(); n];
    match power_from(a, start, tol, POWER_MAX_ITER)? {
        Some(est) => Ok(est),
        None => {
            // all-ones was annihilated by AᵀA; fall back to a fixed non-symmetric pattern
            let mut v: Vec<T> = (0..n).map(|j| T::one() + T::of(((j * 7919) % 101) as f64 / 101.0)).collect();
            let nv = norm2(&v);
            v.iter_mut().for_each(|e| *e = *e / nv);
            Ok(power_from(a, v, tol, POWER_MAX_ITER)?.unwrap_or_else(T::zero))
        }
    }
}

fn power_from<T: Scalar>(a: &SparseMatrix<T>, mut v: Vec<T>, tol: T, cap: usize) -> Result<Option<T>> {
    let mut av = vec![T::zero(); a.n_rows()];
    let mut w = vec![T::zero(); a.n_cols()];
    let mut est = T::zero();
    for it in 0..cap {
        a.mul_vec_into(&v, &mut av);
        a.tr_mul_vec_into(&av, &mut w);
        let nw = norm2(&w);
        if nw == T::zero() {
            return Ok(if it == 0 { None } else { Some(est) });
        }
        let next = nw.sqrt();
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
        if it > 0 && (next - est).abs() <= tol * next {
            return Ok(Some(next));
        }
        est = next;
    }
    Err(Error::PowerIteration { iterations: cap, estimate: est.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm_is_one() {
        let r = spectral_norm_estimate(&SparseMatrix::<f64>::identity(3), 1e-6).unwrap();
        assert!((r - 1.0).abs() < 1e-6);
    }

    #[test]
    fn row_vector_norm() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, 2.0]]);
        let r = spectral_norm_estimate(&a, 1e-10).unwrap();
        assert!((r - 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn diagonal_norm() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]);
        let r = spectral_norm_estimate(&a, 1e-10).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
    }

    #[test]
    fn zero_matrix_is_zero() {
        assert_eq!(spectral_norm_estimate(&SparseMatrix::<f64>::zeros(2, 2), 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn ones_vector_in_kernel_falls_back() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, -1.0]]);
        let r = spectral_norm_estimate(&a, 1e-10).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cap_reports_best_estimate() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, 0.0], vec![0.0, 0.999]]);
        let start = vec![0.5f64.sqrt(); 2];
        match power_from(&a, start, 1e-12, 3) {
            Err(Error::PowerIteration { iterations, estimate }) => {
                assert_eq!(iterations, 3);
                assert!(estimate > 0.999 && estimate <= 1.0);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}
