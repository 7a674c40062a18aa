use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::Scalar;

/// Compressed sparse column matrix.
///
/// Row indices within a column are sorted and unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, col_ptr: vec![0; n_cols + 1], row_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions are
    /// summed; explicit zeros are dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, T)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::Dimension(format!("entry ({i}, {j}) outside {n_rows}x{n_cols}")));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));

        let mut col_ptr = vec![0usize; n_cols + 1];
        let mut row_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<T> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                let top = values.last_mut().expect("previous entry");
                *top = *top + v;
                continue;
            }
            row_idx.push(i);
            values.push(v);
            col_ptr[j + 1] += 1;
            last = Some((i, j));
        }
        for j in 0..n_cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut m = Self { n_rows, n_cols, col_ptr, row_idx, values };
        m.drop_zeros();
        Ok(m)
    }

    /// Builds a matrix from row-major dense data.
    pub fn from_dense_rows(rows: &[Vec<T>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n_cols, "ragged dense rows");
            for (j, &v) in r.iter().enumerate() {
                if v != T::zero() {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &trip).expect("indices in range")
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut trip = Vec::new();
        for j in 0..d.cols() {
            for i in 0..d.rows() {
                let v = d[(i, j)];
                if v != T::zero() {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(d.rows(), d.cols(), &trip).expect("indices in range")
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|v| *v != T::zero()) {
            return;
        }
        let mut col_ptr = vec![0usize; self.n_cols + 1];
        let mut row_idx = Vec::with_capacity(self.row_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.n_cols {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                if self.values[k] != T::zero() {
                    row_idx.push(self.row_idx[k]);
                    values.push(self.values[k]);
                }
            }
            col_ptr[j + 1] = row_idx.len();
        }
        self.col_ptr = col_ptr;
        self.row_idx = row_idx;
        self.values = values;
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[r.clone()].binary_search(&i) {
            Ok(k) => self.values[r.start + k],
            Err(_) => T::zero(),
        }
    }

    /// All entries as `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, T)> {
        (0..self.n_cols).flat_map(|j| self.column(j).map(move |(i, v)| (i, j, v))).collect()
    }

    /// `out = A x`
    pub fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(out.len(), self.n_rows);
        out.iter_mut().for_each(|o| *o = T::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                let i = self.row_idx[k];
                out[i] = out[i] + self.values[k] * xj;
            }
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = Aᵀ y`
    pub fn tr_mul_vec_into(&self, y: &[T], out: &mut [T]) {
        debug_assert_eq!(y.len(), self.n_rows);
        debug_assert_eq!(out.len(), self.n_cols);
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = T::zero();
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                s = s + self.values[k] * y[self.row_idx[k]];
            }
            *o = s;
        }
    }

    pub fn tr_mul_vec(&self, y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_cols];
        self.tr_mul_vec_into(y, &mut out);
        out
    }

    /// `A_j^T y` for a single column.
    pub fn col_dot(&self, j: usize, y: &[T]) -> T {
        self.column(j).map(|(i, v)| v * y[i]).sum()
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut col_ptr = Vec::with_capacity(cols.len() + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for &j in cols {
            let r = self.col_ptr[j]..self.col_ptr[j + 1];
            row_idx.extend_from_slice(&self.row_idx[r.clone()]);
            values.extend_from_slice(&self.values[r]);
            col_ptr.push(row_idx.len());
        }
        Self { n_rows: self.n_rows, n_cols: cols.len(), col_ptr, row_idx, values }
    }

    pub fn transpose(&self) -> Self {
        let trip: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &trip).expect("indices in range")
    }

    /// `[self, other]`
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.n_rows != other.n_rows {
            return Err(Error::Dimension(format!("hstack rows {} vs {}", self.n_rows, other.n_rows)));
        }
        let mut m = self.clone();
        let base = m.row_idx.len();
        m.row_idx.extend_from_slice(&other.row_idx);
        m.values.extend_from_slice(&other.values);
        m.col_ptr.extend(other.col_ptr[1..].iter().map(|p| p + base));
        m.n_cols += other.n_cols;
        Ok(m)
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v = *v * alpha);
        m.drop_zeros();
        m
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for j in 0..self.n_cols {
            for (i, v) in self.column(j) {
                d[(i, j)] = v;
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}
