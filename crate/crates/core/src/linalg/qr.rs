//! Householder QR with column pivoting and the complete orthogonal
//! decomposition used for minimal-norm least squares.

use crate::linalg::vector::{dot, norm2};
use crate::linalg::DenseMatrix;
use crate::Scalar;

/// Relative rank threshold on the pivoted diagonal of R.
pub const RANK_TOL: f64 = 1e-10;

/// Householder reflector `I - beta v vᵀ` acting on rows `offset..`.
#[derive(Debug, Clone)]
struct Reflector<T> {
    offset: usize,
    v: Vec<T>,
    beta: T,
}

impl<T: Scalar> Reflector<T> {
    /// Reflector mapping `x` onto a multiple of e₁. Returns the reflector and the
    /// resulting leading entry.
    fn new(offset: usize, x: &[T]) -> (Self, T) {
        let norm = norm2(x);
        if norm == T::zero() {
            return (Self { offset, v: vec![T::zero(); x.len()], beta: T::zero() }, T::zero());
        }
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] = v[0] - alpha;
        let vv = dot(&v, &v);
        let beta = if vv == T::zero() { T::zero() } else { T::two() / vv };
        (Self { offset, v, beta }, alpha)
    }

    fn apply(&self, y: &mut [T]) {
        if self.beta == T::zero() {
            return;
        }
        let tail = &mut y[self.offset..];
        let s = self.beta * dot(&self.v, tail);
        for (t, &vi) in tail.iter_mut().zip(&self.v) {
            *t = *t - s * vi;
        }
    }
}

/// `A P = Q R` with column pivoting.
#[derive(Debug, Clone)]
pub struct PivotedQr<T> {
    r: DenseMatrix<T>,
    reflectors: Vec<Reflector<T>>,
    perm: Vec<usize>,
    rank: usize,
}

impl<T: Scalar> PivotedQr<T> {
    pub fn new(a: &DenseMatrix<T>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut reflectors = Vec::with_capacity(steps);
        for k in 0..steps {
            // pick the remaining column with the largest trailing norm
            let mut best = k;
            let mut best_norm = T::neg_infinity();
            for j in k..n {
                let nj = norm2(&r.col(j)[k..]);
                if nj > best_norm {
                    best_norm = nj;
                    best = j;
                }
            }
            r.swap_cols(k, best);
            perm.swap(k, best);
            let (h, lead) = Reflector::new(k, &r.col(k)[k..]);
            for j in k + 1..n {
                h.apply(r.col_mut(j));
            }
            let col = r.col_mut(k);
            col[k] = lead;
            col[k + 1..].iter_mut().for_each(|v| *v = T::zero());
            reflectors.push(h);
        }
        let top = if steps > 0 { r[(0, 0)].abs() } else { T::zero() };
        let thresh = T::of(RANK_TOL) * top;
        let rank = (0..steps).take_while(|&k| top > T::zero() && r[(k, k)].abs() > thresh).count();
        Self { r, reflectors, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Column permutation: column `k` of `A P` is column `perm[k]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn r(&self) -> &DenseMatrix<T> {
        &self.r
    }

    /// Overwrites `b` with `Qᵀ b`.
    pub fn apply_qt(&self, b: &mut [T]) {
        for h in &self.reflectors {
            h.apply(b);
        }
    }

    /// Overwrites `b` with `Q b`.
    pub fn apply_q(&self, b: &mut [T]) {
        for h in self.reflectors.iter().rev() {
            h.apply(b);
        }
    }
}

/// Complete orthogonal decomposition `A P = Q [Sᵀ 0; 0 0] Zᵀ`, giving the
/// minimal-norm least-squares solution for rank-deficient `A`.
#[derive(Debug, Clone)]
pub struct CompleteOrthogonal<T> {
    qr: PivotedQr<T>,
    // factorization of the leading rank rows of R, transposed
    z_reflectors: Vec<Reflector<T>>,
    s: DenseMatrix<T>,
    n: usize,
}

impl<T: Scalar> CompleteOrthogonal<T> {
    pub fn new(a: &DenseMatrix<T>) -> Self {
        let qr = PivotedQr::new(a);
        let n = a.cols();
        let r = qr.rank();
        // Tᵀ (n x r) where T is the leading r rows of R
        let mut tt = DenseMatrix::zeros(n, r);
        for i in 0..r {
            for j in i..n {
                tt[(j, i)] = qr.r()[(i, j)];
            }
        }
        let mut z_reflectors = Vec::with_capacity(r);
        for k in 0..r {
            let (h, lead) = Reflector::new(k, &tt.col(k)[k..]);
            for j in k + 1..r {
                h.apply(tt.col_mut(j));
            }
            let col = tt.col_mut(k);
            col[k] = lead;
            col[k + 1..].iter_mut().for_each(|v| *v = T::zero());
            z_reflectors.push(h);
        }
        let mut s = DenseMatrix::zeros(r, r);
        for j in 0..r {
            for i in 0..=j {
                s[(i, j)] = tt[(i, j)];
            }
        }
        Self { qr, z_reflectors, s, n }
    }

    pub fn rank(&self) -> usize {
        self.qr.rank()
    }

    /// Minimal-norm minimizer of `‖A x − b‖₂`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let r = self.rank();
        let mut c = b.to_vec();
        self.qr.apply_qt(&mut c);
        // Sᵀ u = c[..r], Sᵀ lower triangular
        let mut u = vec![T::zero(); r];
        for i in 0..r {
            let mut acc = c[i];
            for k in 0..i {
                acc = acc - self.s[(k, i)] * u[k];
            }
            u[i] = acc / self.s[(i, i)];
        }
        let mut w = vec![T::zero(); self.n];
        w[..r].copy_from_slice(&u);
        for h in self.z_reflectors.iter().rev() {
            h.apply(&mut w);
        }
        let mut x = vec![T::zero(); self.n];
        for (k, &p) in self.qr.perm().iter().enumerate() {
            x[p] = w[k];
        }
        x
    }
}
