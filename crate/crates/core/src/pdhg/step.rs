use crate::error::{Error, Result};
use crate::linalg::vector::{dot, first_non_finite, norm2};
use crate::lp::StandardLp;
use crate::pdhg::{PdhgState, Residuals};
use crate::Scalar;

/// One PDHG step
/// `x⁺ = proj(x − η(c − Aᵀy))`, `y⁺ = y + η(b − A(2x⁺ − x))`,
/// where `proj` clamps to the column bounds.
pub fn pdhg_step<T: Scalar>(state: &PdhgState<T>, lp: &StandardLp<T>, eta: T) -> Result<PdhgState<T>> {
    state.check_dims(lp)?;
    let aty = lp.a.tr_mul_vec(&state.y);
    let ax = lp.a.mul_vec(&state.x);
    let mut x = vec![T::zero(); lp.n_cols()];
    let mut ax_new = vec![T::zero(); lp.n_rows()];
    let mut y = state.y.clone();
    primal_update(lp, eta, &state.x, &aty, &mut x);
    lp.a.mul_vec_into(&x, &mut ax_new);
    dual_update(lp, eta, &ax, &ax_new, &mut y);
    check_finite(&x, &y)?;
    Ok(PdhgState { x, y, k: state.k + 1 })
}

pub(crate) fn primal_update<T: Scalar>(lp: &StandardLp<T>, eta: T, x: &[T], aty: &[T], out: &mut [T]) {
    for j in 0..x.len() {
        out[j] = lp.clamp(j, x[j] - eta * (lp.c[j] - aty[j]));
    }
}

/// `y ← y + η(b − (2Ax⁺ − Ax))`.
pub(crate) fn dual_update<T: Scalar>(lp: &StandardLp<T>, eta: T, ax: &[T], ax_new: &[T], y: &mut [T]) {
    for i in 0..y.len() {
        y[i] = y[i] + eta * (lp.b[i] - (T::two() * ax_new[i] - ax[i]));
    }
}

pub(crate) fn check_finite<T: Scalar>(x: &[T], y: &[T]) -> Result<()> {
    if let Some(j) = first_non_finite(x) {
        return Err(Error::NonFinite { what: "primal iterate", index: j });
    }
    if let Some(i) = first_non_finite(y) {
        return Err(Error::NonFinite { what: "dual iterate", index: i });
    }
    Ok(())
}

/// Relative primal, dual and gap residuals of `z`.
pub fn residuals<T: Scalar>(lp: &StandardLp<T>, z: &PdhgState<T>) -> Residuals {
    let ax = lp.a.mul_vec(&z.x);
    let aty = lp.a.tr_mul_vec(&z.y);
    residuals_cached(lp, &z.x, &z.y, &ax, &aty)
}

/// Residuals given `Ax` and `Aᵀy`.
///
/// With bounds `[l, u]` the reduced cost `r = c − Aᵀy` is split into bound
/// multipliers; the part no finite bound can absorb is the dual residual, and
/// the finite bounds enter the dual objective.
pub(crate) fn residuals_cached<T: Scalar>(lp: &StandardLp<T>, x: &[T], y: &[T], ax: &[T], aty: &[T]) -> Residuals {
    let f = |v: T| v.as_f64();
    let mut pr = 0.0;
    for i in 0..lp.n_rows() {
        let d = f(ax[i]) - f(lp.b[i]);
        pr += d * d;
    }
    let mut dr = 0.0;
    let mut dual_obj: f64 = (0..lp.n_rows()).map(|i| f(lp.b[i]) * f(y[i])).sum();
    for j in 0..lp.n_cols() {
        let r = f(lp.c[j]) - f(aty[j]);
        let (l, u) = (f(lp.lower[j]), f(lp.upper[j]));
        if r > 0.0 {
            if l.is_finite() {
                dual_obj += l * r;
            } else {
                dr += r * r;
            }
        } else if r < 0.0 {
            if u.is_finite() {
                dual_obj += u * r;
            } else {
                dr += r * r;
            }
        }
    }
    let primal_obj: f64 = (0..lp.n_cols()).map(|j| f(lp.c[j]) * f(x[j])).sum();
    let nb = norm2(&lp.b).as_f64();
    let nc = norm2(&lp.c).as_f64();
    Residuals {
        primal_res: pr.sqrt() / (1.0 + nb),
        dual_res: dr.sqrt() / (1.0 + nc),
        gap: (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs() + dual_obj.abs()),
    }
}

/// `‖(dx, dy)‖_M` with `M = [[I, ηAᵀ], [ηA, I]]`.
pub fn m_norm<T: Scalar>(lp: &StandardLp<T>, eta: T, dx: &[T], dy: &[T]) -> T {
    let adx = lp.a.mul_vec(dx);
    let sq = dot(dx, dx) + dot(dy, dy) + T::two() * eta * dot(dy, &adx);
    sq.max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::lp::toy_example;

    #[test]
    fn toy_hand_step() {
        let lp = toy_example::<f64>();
        let z = PdhgState::new(vec![1.0, 2.0], vec![2.0]);
        let n = pdhg_step(&z, &lp, 0.05).unwrap();
        // x⁺ = (1 − 0.05·0, 2 − 0.05·(3 − 4)) = (1, 2.05)
        assert!((n.x[0] - 1.0).abs() < 1e-15 && (n.x[1] - 2.05).abs() < 1e-15);
        // y⁺ = 2 + 0.05·(1 − (2·5.1 − 5)) = 1.79
        assert!((n.y[0] - 1.79).abs() < 1e-14);
        assert_eq!(n.k, 1);
    }

    #[test]
    fn saddle_point_is_fixed() {
        let lp = toy_example::<f64>();
        let z = PdhgState::new(vec![0.0, 0.5], vec![1.5]);
        let n = pdhg_step(&z, &lp, 0.05).unwrap();
        assert_eq!((n.x, n.y), (z.x, z.y));
    }

    #[test]
    fn zero_data_is_fixed() {
        // with c = 0, b = 0, y = 0 the dual update is −ηAx, so x must lie in ker(A)
        let lp = StandardLp::new(SparseMatrix::from_dense_rows(&[vec![1.0, -1.0]]), vec![0.0], vec![0.0, 0.0]).unwrap();
        let z = PdhgState::new(vec![0.4, 0.4], vec![0.0]);
        let n = pdhg_step(&z, &lp, 0.5).unwrap();
        assert_eq!(n.x, z.x);
        assert_eq!(n.y, vec![0.0]);
    }

    #[test]
    fn toy_residuals() {
        let lp = toy_example::<f64>();
        let r = residuals(&lp, &PdhgState::new(vec![0.0, 0.5], vec![1.5]));
        assert!(r.max() < 1e-12);
        let r = residuals(&lp, &PdhgState::new(vec![1.0, 2.0], vec![2.0]));
        assert!((r.primal_res - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_reported() {
        let lp = toy_example::<f64>();
        let z = PdhgState::new(vec![f64::NAN, 0.0], vec![0.0]);
        assert!(matches!(pdhg_step(&z, &lp, 0.05), Err(Error::NonFinite { index: 0, .. })));
    }
}
