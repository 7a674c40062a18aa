use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lsmr::lsmr;
use crate::linalg::qr::CompleteOrthogonal;
use crate::linalg::vector::{norm2, sub};
use crate::linalg::SparseMatrix;
use crate::Scalar;

/// Matrices with fewer rows or columns than this are solved directly under
/// [`LsMethod::Auto`].
pub const DEFAULT_DIRECT_THRESHOLD: usize = 1000;

/// Relative tolerance handed to the iterative solver under `Auto`.
pub const ITERATIVE_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LsMethod {
    #[default]
    Auto,
    Direct,
    Iterative,
}

impl std::str::FromStr for LsMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "direct" => Ok(Self::Direct),
            "iterative" => Ok(Self::Iterative),
            other => Err(Error::Invalid(format!("unknown least-squares method `{other}`"))),
        }
    }
}

/// Method actually used for a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Direct,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsOptions {
    pub method: LsMethod,
    /// Relative tolerance for the iterative path.
    pub tol: f64,
    pub direct_threshold: usize,
}

impl Default for LsOptions {
    fn default() -> Self {
        Self { method: LsMethod::Auto, tol: ITERATIVE_TOL, direct_threshold: DEFAULT_DIRECT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LsSolveReport<T> {
    pub solution: Vec<T>,
    /// ‖Aᵀ(Ax − b)‖₂
    pub normal_residual_norm: T,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Minimal-norm minimizer of ‖Ax − b‖₂.
pub fn least_squares<T: Scalar>(a: &SparseMatrix<T>, b: &[T], method: LsMethod, tol: T) -> Result<LsSolveReport<T>> {
    let opts = LsOptions { method, tol: tol.as_f64(), ..LsOptions::default() };
    least_squares_with(a, b, &opts)
}

pub fn least_squares_with<T: Scalar>(a: &SparseMatrix<T>, b: &[T], opts: &LsOptions) -> Result<LsSolveReport<T>> {
    if b.len() != a.n_rows() {
        return Err(Error::Dimension(format!("rhs length {} for {} rows", b.len(), a.n_rows())));
    }
    let (m, n) = (a.n_rows(), a.n_cols());
    let method = match opts.method {
        LsMethod::Direct => SolveMethod::Direct,
        LsMethod::Iterative => SolveMethod::Iterative,
        LsMethod::Auto if m.min(n) < opts.direct_threshold => SolveMethod::Direct,
        LsMethod::Auto => SolveMethod::Iterative,
    };
    if n == 0 || m == 0 {
        return Ok(LsSolveReport { solution: vec![T::zero(); n], normal_residual_norm: T::zero(), iterations: 0, method });
    }
    let (solution, iterations) = match method {
        SolveMethod::Direct => (CompleteOrthogonal::new(&a.to_dense()).solve(b), 0),
        SolveMethod::Iterative => {
            let out = lsmr(a, b, T::of(opts.tol), 10 * (m + n))?;
            (out.x, out.iterations)
        }
    };
    let r = sub(&a.mul_vec(&solution), b);
    let normal_residual_norm = norm2(&a.tr_mul_vec(&r));
    Ok(LsSolveReport { solution, normal_residual_norm, iterations, method })
}

/// Orthogonal projection of `x0` onto `{x : A x = 0}`, computed as
/// `x0 − A†(A x0)`.
pub fn project_kernel<T: Scalar>(a: &SparseMatrix<T>, x0: &[T]) -> Result<Vec<T>> {
    project_kernel_with(a, x0, &LsOptions::default())
}

pub fn project_kernel_with<T: Scalar>(a: &SparseMatrix<T>, x0: &[T], opts: &LsOptions) -> Result<Vec<T>> {
    if x0.len() != a.n_cols() {
        return Err(Error::Dimension(format!("vector length {} for {} columns", x0.len(), a.n_cols())));
    }
    let ax = a.mul_vec(x0);
    let corr = least_squares_with(a, &ax, opts)?;
    Ok(sub(x0, &corr.solution))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row12() -> SparseMatrix<f64> {
        SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, 2.0]])
    }

    #[test]
    fn identity_returns_rhs() {
        let r = least_squares(&SparseMatrix::<f64>::identity(2), &[3.0, 4.0], LsMethod::Auto, 1e-16).unwrap();
        assert_eq!(r.method, SolveMethod::Direct);
        assert!((r.solution[0] - 3.0).abs() < 1e-15 && (r.solution[1] - 4.0).abs() < 1e-15);
    }

    #[test]
    fn row_vector_pseudoinverse() {
        for method in [LsMethod::Direct, LsMethod::Iterative] {
            let r = least_squares(&row12(), &[1.0], method, 1e-16).unwrap();
            assert!((r.solution[0] - 0.2).abs() < 1e-14, "{method:?}");
            assert!((r.solution[1] - 0.4).abs() < 1e-14, "{method:?}");
        }
    }

    #[test]
    fn column_of_ones_gives_mean() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0], vec![1.0]]);
        let r = least_squares(&a, &[1.0, 2.0], LsMethod::Auto, 1e-16).unwrap();
        assert!((r.solution[0] - 1.5).abs() < 1e-15);
        assert!(r.normal_residual_norm < 1e-14);
    }

    #[test]
    fn rhs_length_checked() {
        assert!(least_squares(&row12(), &[1.0, 2.0], LsMethod::Auto, 1e-16).is_err());
    }

    #[test]
    fn auto_switches_on_threshold() {
        let opts = LsOptions { direct_threshold: 1, ..LsOptions::default() };
        let r = least_squares_with(&row12(), &[1.0], &opts).unwrap();
        assert_eq!(r.method, SolveMethod::Iterative);
    }

    #[test]
    fn kernel_projection_examples() {
        let p = project_kernel(&row12(), &[2.0, -1.0]).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-15 && (p[1] + 1.0).abs() < 1e-15);
        let p = project_kernel(&row12(), &[1.0, 1.0]).unwrap();
        assert!((p[0] - 0.4).abs() < 1e-15 && (p[1] + 0.2).abs() < 1e-15);
        let p = project_kernel(&SparseMatrix::<f64>::identity(3), &[1.0, -2.0, 5.0]).unwrap();
        assert!(p.iter().all(|v| v.abs() < 1e-15));
    }
}
