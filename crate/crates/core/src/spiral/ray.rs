use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::vector::{dot, gather};
use crate::linalg::{least_squares_with, project_kernel_with, LsOptions, SparseMatrix};
use crate::lp::StandardLp;
use crate::pdhg::PdhgState;
use crate::spiral::BasisPartition;
use crate::Scalar;

/// Spiral center `z_v` and per-iteration ray `v` of a phase.
///
/// All vectors are full length (`n` for x, `m` for y); non-basic entries of
/// the center hold the fixed bound values and the ray is zero there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpiralRay<T> {
    pub basis: BasisPartition,
    pub eta: T,
    pub center_x: Vec<T>,
    pub center_y: Vec<T>,
    pub dir_x: Vec<T>,
    pub dir_y: Vec<T>,
}

impl<T: Scalar> SpiralRay<T> {
    pub fn direction_norm(&self) -> T {
        (dot(&self.dir_x, &self.dir_x) + dot(&self.dir_y, &self.dir_y)).sqrt()
    }
}

/// Center and ray of the phase with basis `basis` entered at `z0`:
///
/// `(x_v)_B = A_B†b̂ + proj_{ker A_B}(x0_B)`, `y_v = (A_Bᵀ)†c_B + proj_{ker A_Bᵀ}(y0)`,
/// `(v_x)_B = −η(c_B − A_BᵀA_Bᵀ†c_B)`, `v_y = η(b̂ − A_B A_B†b̂)`,
/// where `b̂ = b − A_N x0_N` (just `b` when non-basic variables sit at 0).
pub fn spiral_of_phase<T: Scalar>(
    lp: &StandardLp<T>,
    basis: &BasisPartition,
    z0: &PdhgState<T>,
    eta: T,
    opts: &LsOptions,
) -> Result<SpiralRay<T>> {
    z0.check_dims(lp)?;
    if basis.n() != lp.n_cols() {
        return Err(Error::Dimension(format!("basis covers {} of {} columns", basis.n(), lp.n_cols())));
    }
    let (m, n) = (lp.n_rows(), lp.n_cols());
    let a_b = lp.a.select_columns(&basis.basic);
    let a_bt = a_b.transpose();
    let c_b = gather(&lp.c, &basis.basic);
    let x0_b = gather(&z0.x, &basis.basic);

    let mut x_n = vec![T::zero(); n];
    for &j in &basis.nonbasic {
        x_n[j] = z0.x[j];
    }
    let an_xn = lp.a.mul_vec(&x_n);
    let b_hat: Vec<T> = lp.b.iter().zip(&an_xn).map(|(&b, &v)| b - v).collect();

    let x_hat = least_squares_with(&a_b, &b_hat, opts)?.solution;
    let y_hat = least_squares_with(&a_bt, &c_b, opts)?.solution;
    let x_ker = project_kernel_with(&a_b, &x0_b, opts)?;
    let y_ker = project_kernel_with(&a_bt, &z0.y, opts)?;

    let mut center_x = x_n;
    let mut dir_x = vec![T::zero(); n];
    let proj_c = a_bt.mul_vec(&y_hat);
    for (t, &j) in basis.basic.iter().enumerate() {
        center_x[j] = x_hat[t] + x_ker[t];
        dir_x[j] = -eta * (c_b[t] - proj_c[t]);
    }
    let center_y: Vec<T> = y_hat.iter().zip(&y_ker).map(|(&a, &b)| a + b).collect();
    let proj_b = a_b.mul_vec(&x_hat);
    let dir_y: Vec<T> = (0..m).map(|i| eta * (b_hat[i] - proj_b[i])).collect();
    Ok(SpiralRay { basis: basis.clone(), eta, center_x, center_y, dir_x, dir_y })
}

/// One application of `P_B = [[I, ηA_Bᵀ], [−ηA_B, I − 2η²A_BA_Bᵀ]]` in place.
fn rotate_once<T: Scalar>(a_b: &SparseMatrix<T>, eta: T, wx: &mut [T], wy: &mut [T]) {
    let aty = a_b.tr_mul_vec(wy);
    // y' = y − ηA x − 2η²AAᵀy = y − ηA(2x' − x) with x' = x + ηAᵀy
    let mut two_xp_minus_x = vec![T::zero(); wx.len()];
    for t in 0..wx.len() {
        let xp = wx[t] + eta * aty[t];
        two_xp_minus_x[t] = T::two() * xp - wx[t];
        wx[t] = xp;
    }
    let a2 = a_b.mul_vec(&two_xp_minus_x);
    for i in 0..wy.len() {
        wy[i] = wy[i] - eta * a2[i];
    }
}

/// `P_Bᵏ w` for `w = (w_B, w_y)` of length `|B| + m`, by `k` structured products.
pub fn apply_rotation<T: Scalar>(basis: &BasisPartition, lp: &StandardLp<T>, eta: T, w: &[T], k: usize) -> Result<Vec<T>> {
    let nb = basis.basic.len();
    if w.len() != nb + lp.n_rows() {
        return Err(Error::Dimension(format!("rotation input of length {} for |B| + m = {}", w.len(), nb + lp.n_rows())));
    }
    let a_b = lp.a.select_columns(&basis.basic);
    let (mut wx, mut wy) = (w[..nb].to_vec(), w[nb..].to_vec());
    for _ in 0..k {
        rotate_once(&a_b, eta, &mut wx, &mut wy);
    }
    wx.extend(wy);
    Ok(wx)
}

/// `z_v + P_Bᵏ(z0 − z_v) + k·v` on the basic and dual coordinates; non-basic
/// coordinates stay at their `z0` values.
pub fn closed_form_iterate<T: Scalar>(lp: &StandardLp<T>, spiral: &SpiralRay<T>, z0: &PdhgState<T>, k: usize) -> Result<PdhgState<T>> {
    Ok(closed_form_path(lp, spiral, z0, k)?.pop().expect("path includes k"))
}

/// Closed-form iterates for `k = 0..=len`.
pub fn closed_form_path<T: Scalar>(lp: &StandardLp<T>, spiral: &SpiralRay<T>, z0: &PdhgState<T>, len: usize) -> Result<Vec<PdhgState<T>>> {
    z0.check_dims(lp)?;
    let basic = &spiral.basis.basic;
    let a_b = lp.a.select_columns(basic);
    let mut wx: Vec<T> = basic.iter().map(|&j| z0.x[j] - spiral.center_x[j]).collect();
    let mut wy: Vec<T> = z0.y.iter().zip(&spiral.center_y).map(|(&a, &b)| a - b).collect();
    let mut out = Vec::with_capacity(len + 1);
    for k in 0..=len {
        if k > 0 {
            rotate_once(&a_b, spiral.eta, &mut wx, &mut wy);
        }
        let kk = T::of(k as f64);
        let mut x = z0.x.clone();
        for (t, &j) in basic.iter().enumerate() {
            x[j] = spiral.center_x[j] + wx[t] + kk * spiral.dir_x[j];
        }
        let y = (0..lp.n_rows()).map(|i| spiral.center_y[i] + wy[i] + kk * spiral.dir_y[i]).collect();
        out.push(PdhgState { x, y, k: z0.k + k });
    }
    Ok(out)
}

/// `cᵀv_x − bᵀv_y`, the per-iteration change of the duality gap along the ray.
pub fn gap_drift<T: Scalar>(lp: &StandardLp<T>, spiral: &SpiralRay<T>) -> T {
    dot(&lp.c, &spiral.dir_x) - dot(&lp.b, &spiral.dir_y)
}
