use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::pdhg::step::{check_finite, dual_update, primal_update};
use crate::pdhg::{m_norm, PdhgState, StepConfig};
use crate::Scalar;

/// Agreement required between the two estimators, in the M-norm.
pub const IDV_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdvEstimate<T> {
    /// Mean of `Tᵏ⁺¹z − Tᵏz` over the final window.
    pub vx: Vec<T>,
    pub vy: Vec<T>,
    /// `Tᴷz / K`.
    pub alt_x: Vec<T>,
    pub alt_y: Vec<T>,
    /// `‖v − alt‖_M`.
    pub disagreement: f64,
    pub degraded: bool,
    pub iterations: usize,
}

impl<T: Scalar> IdvEstimate<T> {
    pub fn norm(&self, lp: &StandardLp<T>, eta: T) -> T {
        m_norm(lp, eta, &self.vx, &self.vy)
    }
}

/// Runs `cfg.max_iter` plain PDHG steps from `z0` and estimates the infimal
/// displacement vector two ways.
pub fn estimate_idv<T: Scalar>(lp: &StandardLp<T>, z0: &PdhgState<T>, cfg: &StepConfig<T>, window: usize) -> Result<IdvEstimate<T>> {
    z0.check_dims(lp)?;
    let big_k = cfg.max_iter;
    if window < 2 || window > big_k {
        return Err(Error::Invalid(format!("window {window} must lie in [2, {big_k}]")));
    }
    let eta = cfg.eta;
    let mut x = z0.x.clone();
    let mut y = z0.y.clone();
    let mut ax = lp.a.mul_vec(&x);
    let mut aty = lp.a.tr_mul_vec(&y);
    let mut x_next = vec![T::zero(); x.len()];
    let mut ax_next = vec![T::zero(); y.len()];
    let mut mark = (x.clone(), y.clone());
    for k in 0..big_k {
        if k == big_k - window {
            mark = (x.clone(), y.clone());
        }
        primal_update(lp, eta, &x, &aty, &mut x_next);
        lp.a.mul_vec_into(&x_next, &mut ax_next);
        dual_update(lp, eta, &ax, &ax_next, &mut y);
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut ax, &mut ax_next);
        lp.a.tr_mul_vec_into(&y, &mut aty);
        check_finite(&x, &y)?;
    }
    let w = T::of(window as f64);
    let kk = T::of(big_k as f64);
    let vx: Vec<T> = x.iter().zip(&mark.0).map(|(&a, &b)| (a - b) / w).collect();
    let vy: Vec<T> = y.iter().zip(&mark.1).map(|(&a, &b)| (a - b) / w).collect();
    let alt_x: Vec<T> = x.iter().map(|&a| a / kk).collect();
    let alt_y: Vec<T> = y.iter().map(|&a| a / kk).collect();
    let dx: Vec<T> = vx.iter().zip(&alt_x).map(|(&a, &b)| a - b).collect();
    let dy: Vec<T> = vy.iter().zip(&alt_y).map(|(&a, &b)| a - b).collect();
    let disagreement = m_norm(lp, eta, &dx, &dy).as_f64();
    Ok(IdvEstimate { vx, vy, alt_x, alt_y, disagreement, degraded: disagreement > IDV_AGREEMENT, iterations: big_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::lp::toy_example;

    #[test]
    fn feasible_toy_has_zero_idv() {
        let lp = toy_example::<f64>();
        let mut cfg = StepConfig::with_eta(0.05);
        cfg.max_iter = 10_000;
        let est = estimate_idv(&lp, &PdhgState::new(vec![1.0, 2.0], vec![2.0]), &cfg, 1000).unwrap();
        assert!(est.norm(&lp, 0.05) <= 1e-6);
    }

    #[test]
    fn infeasible_has_dual_drift() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0], vec![1.0]]);
        let lp = StandardLp::new(a, vec![1.0, 2.0], vec![0.0]).unwrap();
        let mut cfg = StepConfig::for_lp(&lp, 0.9).unwrap();
        cfg.max_iter = 200_000;
        let est = estimate_idv(&lp, &PdhgState::zeros(&lp), &cfg, 1000).unwrap();
        assert!(est.vx[0].abs() < 1e-8);
        assert!(est.vy.iter().any(|v| v.abs() > 1e-3));
        assert!(!est.degraded, "{}", est.disagreement);
    }

    #[test]
    fn window_validated() {
        let lp = toy_example::<f64>();
        let cfg = StepConfig::with_eta(0.05);
        assert!(estimate_idv(&lp, &PdhgState::zeros(&lp), &cfg, 1).is_err());
    }
}
