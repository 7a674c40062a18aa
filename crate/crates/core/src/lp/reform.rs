use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::lp::{GeneralLp, StandardLp};
use crate::Scalar;

/// Shift applied to the row activities so the right-hand side is never zero.
pub const DEFAULT_SHIFT: f64 = 10.0;

/// `min cᵀx  s.t.  Ax − w = −δ·1,  l_x ≤ x ≤ u_x,  l_w + δ ≤ w ≤ u_w + δ`.
///
/// The `−I` block makes the constraint matrix full row rank whatever `A` is.
#[derive(Debug, Clone, PartialEq)]
pub struct ReformulatedLp<T> {
    pub base: GeneralLp<T>,
    pub shift: T,
    /// Box-bounded problem over `(x, w)`; `x` occupies the first `n` columns.
    pub lp: StandardLp<T>,
}

impl<T: Scalar> ReformulatedLp<T> {
    /// Number of original columns.
    pub fn n_original(&self) -> usize {
        self.base.n_cols()
    }

    /// Drops the artificial `w` block.
    pub fn original_x<'a>(&self, z: &'a [T]) -> &'a [T] {
        &z[..self.n_original()]
    }

    /// Lifts an original `x` to `(x, Ax + δ·1)`.
    pub fn lift(&self, x: &[T]) -> Vec<T> {
        let mut z = x.to_vec();
        z.extend(self.base.a.mul_vec(x).into_iter().map(|v| v + self.shift));
        z
    }

    /// Objective of the original problem including its constant offset.
    pub fn original_objective(&self, z: &[T]) -> T {
        crate::linalg::vector::dot(&self.base.c, self.original_x(z)) + self.base.objective_offset
    }
}

/// Builds the full-row-rank reformulation with shift `δ`.
pub fn reformulate<T: Scalar>(lp: &GeneralLp<T>, shift: T) -> Result<ReformulatedLp<T>> {
    let (m, n) = (lp.n_rows(), lp.n_cols());
    let neg_eye = SparseMatrix::identity(m).scaled(-T::one());
    let a_ext = lp.a.hstack(&neg_eye)?;
    let mut c = lp.c.clone();
    c.resize(n + m, T::zero());
    let mut lower = lp.col_lower.clone();
    let mut upper = lp.col_upper.clone();
    // infinite bounds stay infinite under the shift
    lower.extend(lp.row_lower.iter().map(|&l| l + shift));
    upper.extend(lp.row_upper.iter().map(|&u| u + shift));
    let std = StandardLp::with_bounds(a_ext, vec![-shift; m], c, lower, upper)?;
    Ok(ReformulatedLp { base: lp.clone(), shift, lp: std })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneralLp<f64> {
        let a = SparseMatrix::from_dense_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]);
        GeneralLp::new(
            a,
            vec![1.0, -1.0, 0.5],
            vec![1.0, f64::NEG_INFINITY],
            vec![1.0, 4.0],
            vec![0.0, 0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY, 3.0, 2.0],
        )
        .unwrap()
    }

    #[test]
    fn structure() {
        let r = reformulate(&small(), 10.0).unwrap();
        assert_eq!((r.lp.n_rows(), r.lp.n_cols()), (2, 5));
        assert!(r.lp.b.iter().all(|&v| v == -10.0));
        assert_eq!(r.lp.a.get(0, 3), -1.0);
        assert_eq!(r.lp.a.get(1, 4), -1.0);
        assert_eq!(r.lp.a.get(0, 4), 0.0);
        assert_eq!(r.lp.lower[3..], [11.0, f64::NEG_INFINITY]);
        assert_eq!(r.lp.upper[3..], [11.0, 14.0]);
        assert_eq!(r.lp.c[3..], [0.0, 0.0]);
    }

    #[test]
    fn lifted_feasible_point_stays_feasible() {
        let r = reformulate(&small(), 10.0).unwrap();
        let x = [0.2, 0.4, 1.0];
        let z = r.lift(&x);
        let res = r.lp.a.mul_vec(&z);
        assert!(res.iter().zip(&r.lp.b).all(|(u, v)| (u - v).abs() < 1e-14));
        assert!((0..5).all(|j| z[j] >= r.lp.lower[j] - 1e-14 && z[j] <= r.lp.upper[j] + 1e-14));
        assert_eq!(r.original_x(&z), &x);
    }
}
