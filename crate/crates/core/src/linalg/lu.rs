//! Two-stage LU used to complete a set of independent columns to a square
//! nonsingular basis.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::Scalar;

/// Pivots at or below this fraction of the largest entry count as zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FillDiagnostics {
    /// Nonzeros in the input block `[A_B, A_C]`.
    pub input_nnz: usize,
    /// Nonzeros in the complement block after eliminating the `A_B` columns.
    pub complement_nnz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuSelection {
    /// Indices into the columns of `A_C`, in pivot order.
    pub selected_columns: Vec<usize>,
    /// Row order produced by the first factorization: `R₁` then `R₂`.
    pub pivot_order: Vec<usize>,
    pub fill_diagnostics: FillDiagnostics,
}

/// Selects `m − |B|` columns of `a_c` completing the independent columns of
/// `a_b` to a nonsingular `m × m` matrix.
///
/// Stage one factors `A_B` with partial pivoting, splitting rows into `R₁`
/// (pivot rows) and `R₂`; the same row operations applied to `A_C` leave
/// `A_{R₂,C} − L_{R₂,B} L_{R₁,B}⁻¹ A_{R₁,C}` in the `R₂` rows. Stage two runs
/// partial pivoting on the transpose of that complement, so each pivot picks a
/// column.
pub fn lu_select_independent_columns<T: Scalar>(a_b: &SparseMatrix<T>, a_c: &SparseMatrix<T>) -> Result<LuSelection> {
    let m = a_b.n_rows();
    if a_c.n_rows() != m {
        return Err(Error::Dimension(format!("A_B has {m} rows, A_C has {}", a_c.n_rows())));
    }
    let k = a_b.n_cols();
    if k > m {
        return Err(Error::RankDeficient { achieved: m, required: k });
    }
    let p = a_c.n_cols();
    let mut work = a_b.hstack(a_c)?.to_dense();
    let scale = work.max_abs().max(T::min_positive_value());
    let tiny = T::of(PIVOT_TOL) * scale;
    let mut diag = FillDiagnostics { input_nnz: a_b.nnz() + a_c.nnz(), complement_nnz: 0 };

    // stage one: rows of `work` are permuted in place
    let mut rows: Vec<usize> = (0..m).collect();
    for t in 0..k {
        let (piv, val) = (t..m).map(|i| (i, work[(i, t)].abs())).fold((t, T::zero()), |a, b| if b.1 > a.1 { b } else { a });
        if val <= tiny {
            return Err(Error::RankDeficient { achieved: t, required: m });
        }
        work.swap_rows(t, piv);
        rows.swap(t, piv);
        eliminate_below(&mut work, t, t);
    }

    // complement block: rows k..m, columns k..k+p
    let r = m - k;
    let mut sc_t = DenseMatrix::zeros(p, r);
    for i in 0..r {
        for j in 0..p {
            let v = work[(k + i, k + j)];
            if v != T::zero() {
                diag.complement_nnz += 1;
            }
            sc_t[(j, i)] = v;
        }
    }

    // stage two on the transpose: row pivots are columns of A_C
    let mut cand: Vec<usize> = (0..p).collect();
    let mut selected = Vec::with_capacity(r);
    for t in 0..r {
        if t >= p {
            return Err(Error::RankDeficient { achieved: k + t, required: m });
        }
        let (piv, val) = (t..p).map(|i| (i, sc_t[(i, t)].abs())).fold((t, T::zero()), |a, b| if b.1 > a.1 { b } else { a });
        if val <= tiny {
            return Err(Error::RankDeficient { achieved: k + t, required: m });
        }
        sc_t.swap_rows(t, piv);
        cand.swap(t, piv);
        selected.push(cand[t]);
        eliminate_below(&mut sc_t, t, t);
    }

    Ok(LuSelection { selected_columns: selected, pivot_order: rows, fill_diagnostics: diag })
}

/// Gaussian elimination of column `col` below pivot row `piv`.
fn eliminate_below<T: Scalar>(a: &mut DenseMatrix<T>, piv: usize, col: usize) {
    let pv = a[(piv, col)];
    for i in piv + 1..a.rows() {
        let f = a[(i, col)] / pv;
        if f == T::zero() {
            continue;
        }
        a[(i, col)] = T::zero();
        for j in col + 1..a.cols() {
            let u = a[(piv, j)];
            if u != T::zero() {
                a[(i, j)] = a[(i, j)] - f * u;
            }
        }
    }
}

/// Dense LU with partial pivoting for square solves.
#[derive(Debug, Clone)]
pub struct DenseLu<T> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    /// Factors a square matrix, failing when a pivot is numerically zero.
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::Dimension(format!("LU of non-square {}x{}", n, a.cols())));
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = T::of(PIVOT_TOL) * lu.max_abs().max(T::min_positive_value());
        for t in 0..n {
            let (piv, val) = (t..n).map(|i| (i, lu[(i, t)].abs())).fold((t, T::zero()), |a, b| if b.1 > a.1 { b } else { a });
            if val <= tiny {
                return Err(Error::RankDeficient { achieved: t, required: n });
            }
            lu.swap_rows(t, piv);
            perm.swap(t, piv);
            let pv = lu[(t, t)];
            for i in t + 1..n {
                let f = lu[(i, t)] / pv;
                lu[(i, t)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in t + 1..n {
                    let u = lu[(t, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.perm.len();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    /// Solves `Aᵀ y = c`.
    pub fn solve_transpose(&self, c: &[T]) -> Vec<T> {
        let n = self.perm.len();
        // Aᵀ = Uᵀ Lᵀ P
        let mut z = c.to_vec();
        for i in 0..n {
            for k in 0..i {
                z[i] = z[i] - self.lu[(k, i)] * z[k];
            }
            z[i] = z[i] / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                z[i] = z[i] - self.lu[(k, i)] * z[k];
            }
        }
        let mut y = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(m: usize, cs: &[Vec<f64>]) -> SparseMatrix<f64> {
        SparseMatrix::<f64>::from_dense(&DenseMatrix::<f64>::from_columns(m, cs))
    }

    #[test]
    fn picks_the_independent_column() {
        let a_b = cols(2, &[vec![1.0, 0.0]]);
        let a_c = cols(2, &[vec![2.0, 0.0], vec![0.0, 1.0]]);
        let sel = lu_select_independent_columns(&a_b, &a_c).unwrap();
        assert_eq!(sel.selected_columns, vec![1]);
    }

    #[test]
    fn full_basis_selects_nothing() {
        let a_b = cols(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]);
        let a_c = cols(2, &[vec![2.0, 0.0]]);
        assert!(lu_select_independent_columns(&a_b, &a_c).unwrap().selected_columns.is_empty());
    }

    #[test]
    fn empty_basis_takes_identity() {
        let a_b = SparseMatrix::<f64>::zeros(3, 0);
        let sel = lu_select_independent_columns(&a_b, &SparseMatrix::<f64>::identity(3)).unwrap();
        let mut s = sel.selected_columns.clone();
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
    }

    #[test]
    fn rank_deficient_candidates_error() {
        let a_b = cols(2, &[vec![1.0, 0.0]]);
        let a_c = cols(2, &[vec![3.0, 0.0]]);
        match lu_select_independent_columns(&a_b, &a_c) {
            Err(Error::RankDeficient { achieved, required }) => assert_eq!((achieved, required), (1, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dense_lu_solves_both_ways() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let lu = DenseLu::new(&a).unwrap();
        let x = lu.solve(&[1.0, 2.0, 3.0]);
        let ax = a.mul_vec(&x);
        assert!(ax.iter().zip([1.0, 2.0, 3.0]).all(|(u, v)| (u - v).abs() < 1e-14));
        let y = lu.solve_transpose(&[1.0, 2.0, 3.0]);
        let aty = a.tr_mul_vec(&y);
        assert!(aty.iter().zip([1.0, 2.0, 3.0]).all(|(u, v)| (u - v).abs() < 1e-14));
    }

    #[test]
    fn dense_lu_rejects_singular() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(DenseLu::new(&a).is_err());
    }
}
