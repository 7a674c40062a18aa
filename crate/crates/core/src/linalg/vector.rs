//! Small dense-vector kernels.

use crate::Scalar;

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    // scaled to avoid overflow on badly scaled inputs
    let scale = norm_inf(a);
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = a.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// `y += alpha * x`
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + alpha * xi;
    }
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Scalar>(alpha: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| alpha * x).collect()
}

pub fn dist2<T: Scalar>(a: &[T], b: &[T]) -> T {
    norm2(&sub(a, b))
}

/// Gathers `v[idx[k]]` into a new vector.
pub fn gather<T: Scalar>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Writes `src[k]` into `dst[idx[k]]`.
pub fn scatter<T: Scalar>(src: &[T], idx: &[usize], dst: &mut [T]) {
    for (&i, &v) in idx.iter().zip(src) {
        dst[i] = v;
    }
}

pub fn first_non_finite<T: Scalar>(a: &[T]) -> Option<usize> {
    a.iter().position(|x| !x.is_finite())
}
