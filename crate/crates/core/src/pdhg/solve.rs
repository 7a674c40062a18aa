use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::vector::norm2;
use crate::lp::StandardLp;
use crate::pdhg::step::{check_finite, dual_update, primal_update, residuals_cached};
use crate::pdhg::{m_norm, PdhgState, Residuals, Restart, StepConfig, Trajectory};
use crate::Scalar;

/// Iterations between adaptive restart checks.
const RESTART_CHECK: usize = 64;
const SUFFICIENT: f64 = 0.2;
const NECESSARY: f64 = 0.8;
const ARTIFICIAL: f64 = 0.36;
/// First iteration at which the straight-line divergence test runs; it then
/// runs at every doubling.
const DIVERGENCE_START: usize = 8192;
const BLOWUP: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    IterLimit,
    Diverging,
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub state: PdhgState<T>,
    pub status: Status,
    pub trajectory: Trajectory<T>,
    pub residuals: Residuals,
    pub restarts: usize,
}

fn kkt(r: &Residuals) -> f64 {
    (r.primal_res * r.primal_res + r.dual_res * r.dual_res + r.gap * r.gap).sqrt()
}

/// Runs PDHG from `z0` until the residuals fall below `cfg.tol`, the
/// iteration or time budget runs out, or the iterates are seen to diverge.
pub fn solve<T: Scalar>(lp: &StandardLp<T>, z0: &PdhgState<T>, cfg: &StepConfig<T>) -> Result<SolveOutcome<T>> {
    z0.check_dims(lp)?;
    if let Some(j) = (0..lp.n_cols()).find(|&j| z0.x[j] < lp.lower[j] || z0.x[j] > lp.upper[j]) {
        return Err(Error::Invalid(format!("initial x_{j} = {} outside its bounds", z0.x[j])));
    }
    check_finite(&z0.x, &z0.y)?;
    let (m, n) = (lp.n_rows(), lp.n_cols());
    let eta = cfg.eta;
    if !(cfg.primal_weight > 0.0 && cfg.primal_weight.is_finite()) {
        return Err(Error::Invalid(format!("primal weight {} must be positive", cfg.primal_weight)));
    }
    // τ = η/ω, σ = ηω; ω = 1 is the plain iteration
    let mut omega = cfg.primal_weight;
    let mut tau = eta / T::of(omega);
    let mut sigma = eta * T::of(omega);
    let start = Instant::now();
    let stride = cfg.record_stride.unwrap_or(0);
    let mut traj = Trajectory::new(stride.max(1));
    let record = |traj: &mut Trajectory<T>, x: &[T], y: &[T], k: usize| {
        if stride > 0 && k % stride == 0 {
            traj.snapshots.push(PdhgState { x: x.to_vec(), y: y.to_vec(), k });
        }
    };

    let mut x = z0.x.clone();
    let mut y = z0.y.clone();
    let mut k = z0.k;
    let mut ax = lp.a.mul_vec(&x);
    let mut aty = lp.a.tr_mul_vec(&y);
    let mut x_prev = vec![T::zero(); n];
    let mut y_prev = vec![T::zero(); m];
    let mut ax_prev = vec![T::zero(); m];
    let mut aty_prev = vec![T::zero(); n];

    record(&mut traj, &x, &y, k);
    let mut res = residuals_cached(lp, &x, &y, &ax, &aty);
    let finish = |x: Vec<T>, y: Vec<T>, k, status, residuals, traj, restarts| {
        Ok(SolveOutcome { state: PdhgState { x, y, k }, status, trajectory: traj, residuals, restarts })
    };
    if res.within(cfg.tol) {
        return finish(x, y, k, Status::Optimal, res, traj, 0);
    }

    let norm0 = (norm2(&x).as_f64().powi(2) + norm2(&y).as_f64().powi(2)).sqrt();
    let restarting = cfg.restart != Restart::Off;
    let mut sum_x = vec![T::zero(); n];
    let mut sum_y = vec![T::zero(); m];
    let mut epoch = 0usize;
    let mut restarts = 0usize;
    let mut kkt_restart = kkt(&res);
    let mut kkt_prev_cand = f64::INFINITY;
    let mut next_div_check = k + DIVERGENCE_START;
    let mut anchor: Option<(Vec<T>, Vec<T>, T, usize)> = None;
    let mut last_restart = (x.clone(), y.clone());

    for _ in 0..cfg.max_iter {
        std::mem::swap(&mut x, &mut x_prev);
        std::mem::swap(&mut y, &mut y_prev);
        std::mem::swap(&mut ax, &mut ax_prev);
        std::mem::swap(&mut aty, &mut aty_prev);
        primal_update(lp, tau, &x_prev, &aty_prev, &mut x);
        lp.a.mul_vec_into(&x, &mut ax);
        y.copy_from_slice(&y_prev);
        dual_update(lp, sigma, &ax_prev, &ax, &mut y);
        lp.a.tr_mul_vec_into(&y, &mut aty);
        check_finite(&x, &y)?;
        k += 1;
        record(&mut traj, &x, &y, k);
        res = residuals_cached(lp, &x, &y, &ax, &aty);
        if res.within(cfg.tol) {
            return finish(x, y, k, Status::Optimal, res, traj, restarts);
        }

        if restarting {
            for (s, &v) in sum_x.iter_mut().zip(&x) {
                *s = *s + v;
            }
            for (s, &v) in sum_y.iter_mut().zip(&y) {
                *s = *s + v;
            }
            epoch += 1;
            let due = match cfg.restart {
                Restart::Fixed(p) => epoch >= p.max(1),
                Restart::Adaptive => epoch % RESTART_CHECK == 0,
                Restart::Off => false,
            };
            if due {
                let w = T::one() / T::of(epoch as f64);
                let avg_x: Vec<T> = sum_x.iter().enumerate().map(|(j, &s)| lp.clamp(j, s * w)).collect();
                let avg_y: Vec<T> = sum_y.iter().map(|&s| s * w).collect();
                let avg_ax = lp.a.mul_vec(&avg_x);
                let avg_aty = lp.a.tr_mul_vec(&avg_y);
                let avg_res = residuals_cached(lp, &avg_x, &avg_y, &avg_ax, &avg_aty);
                if avg_res.within(cfg.tol) {
                    return finish(avg_x, avg_y, k, Status::Optimal, avg_res, traj, restarts);
                }
                let take_avg = matches!(cfg.restart, Restart::Fixed(_)) || kkt(&avg_res) < kkt(&res);
                let cand = if take_avg { kkt(&avg_res) } else { kkt(&res) };
                let fire = match cfg.restart {
                    Restart::Fixed(_) => true,
                    _ => {
                        cand <= SUFFICIENT * kkt_restart
                            || (cand <= NECESSARY * kkt_restart && cand > kkt_prev_cand)
                            || (epoch as f64) >= ARTIFICIAL * ((k - z0.k) as f64)
                    }
                };
                kkt_prev_cand = cand;
                if fire {
                    if take_avg {
                        x = avg_x;
                        y = avg_y;
                        ax = avg_ax;
                        aty = avg_aty;
                        res = avg_res;
                    }
                    restarts += 1;
                    if cfg.adaptive_weight {
                        let dx = crate::linalg::vector::dist2(&x, &last_restart.0).as_f64();
                        let dy = crate::linalg::vector::dist2(&y, &last_restart.1).as_f64();
                        if dx > 1e-10 && dy > 1e-10 {
                            omega = (0.5 * (dy / dx).ln() + 0.5 * omega.ln()).exp();
                            tau = eta / T::of(omega);
                            sigma = eta * T::of(omega);
                        }
                        last_restart = (x.clone(), y.clone());
                    }
                    kkt_restart = cand;
                    kkt_prev_cand = f64::INFINITY;
                    sum_x.iter_mut().for_each(|s| *s = T::zero());
                    sum_y.iter_mut().for_each(|s| *s = T::zero());
                    epoch = 0;
                }
            }
        }

        if k % 1024 == 0 {
            let nz = (norm2(&x).as_f64().powi(2) + norm2(&y).as_f64().powi(2)).sqrt();
            if nz > BLOWUP * (1.0 + norm0) {
                return finish(x, y, k, Status::Diverging, res, traj, restarts);
            }
            if let Some(limit) = cfg.time_limit {
                if start.elapsed() >= limit {
                    return finish(x, y, k, Status::TimeLimit, res, traj, restarts);
                }
            }
        }
        if k >= next_div_check {
            next_div_check = 2 * k;
            let dx: Vec<T> = x.iter().zip(&x_prev).map(|(&a, &b)| a - b).collect();
            let dy: Vec<T> = y.iter().zip(&y_prev).map(|(&a, &b)| a - b).collect();
            let step = m_norm(lp, eta, &dx, &dy);
            if let Some((ax0, ay0, step0, k0)) = anchor.take() {
                if straight_line(lp, eta, (&x, &y), (&ax0, &ay0), step, step0, k - k0) && is_certificate(lp, &dx, &dy) {
                    return finish(x, y, k, Status::Diverging, res, traj, restarts);
                }
            }
            anchor = Some((x.clone(), y.clone(), step, k));
        }
    }
    finish(x, y, k, Status::IterLimit, res, traj, restarts)
}

/// Successive differences have the same length at both checkpoints and the
/// iterate travelled at least a quarter of the straight-line distance.
fn straight_line<T: Scalar>(lp: &StandardLp<T>, eta: T, z: (&[T], &[T]), z0: (&[T], &[T]), step: T, step0: T, span: usize) -> bool {
    let (s, s0) = (step.as_f64(), step0.as_f64());
    if s <= 1e-12 || (s - s0).abs() > 1e-3 * s {
        return false;
    }
    let dx: Vec<T> = z.0.iter().zip(z0.0).map(|(&a, &b)| a - b).collect();
    let dy: Vec<T> = z.1.iter().zip(z0.1).map(|(&a, &b)| a - b).collect();
    m_norm(lp, eta, &dx, &dy).as_f64() >= 0.25 * span as f64 * s
}

/// Relative tolerance for accepting a drift direction as a certificate.
const CERT_TOL: f64 = 1e-6;

/// Whether `dy` certifies primal infeasibility or `dx` certifies an unbounded
/// primal (Farkas alternatives for box-constrained equality systems).
pub(crate) fn is_certificate<T: Scalar>(lp: &StandardLp<T>, dx: &[T], dy: &[T]) -> bool {
    primal_infeasibility_ray(lp, dy) || unbounded_ray(lp, dx)
}

/// `bᵀd > sup_{l ≤ x ≤ u} dᵀAx`, with the supremum finite.
fn primal_infeasibility_ray<T: Scalar>(lp: &StandardLp<T>, d: &[T]) -> bool {
    let nd = norm2(d).as_f64();
    if nd == 0.0 {
        return false;
    }
    let atd = lp.a.tr_mul_vec(d);
    let scale = nd * (1.0 + lp.a.max_abs().as_f64());
    let mut sup = 0.0;
    for (j, &g) in atd.iter().enumerate() {
        let g = g.as_f64();
        if g.abs() <= CERT_TOL * scale {
            continue;
        }
        let bound = if g > 0.0 { lp.upper[j] } else { lp.lower[j] }.as_f64();
        if !bound.is_finite() {
            return false;
        }
        sup += g * bound;
    }
    let btd: f64 = lp.b.iter().zip(d).map(|(&b, &v)| b.as_f64() * v.as_f64()).sum();
    btd - sup > CERT_TOL * nd * (1.0 + norm2(&lp.b).as_f64())
}

/// `Ad = 0`, `d` a recession direction of the box and `cᵀd < 0`.
fn unbounded_ray<T: Scalar>(lp: &StandardLp<T>, d: &[T]) -> bool {
    let nd = norm2(d).as_f64();
    if nd == 0.0 {
        return false;
    }
    let tol = CERT_TOL * nd;
    if norm2(&lp.a.mul_vec(d)).as_f64() > tol * (1.0 + lp.a.max_abs().as_f64()) {
        return false;
    }
    let recedes = d.iter().enumerate().all(|(j, &v)| {
        let v = v.as_f64();
        v.abs() <= tol || (v > 0.0 && lp.upper[j].is_infinite()) || (v < 0.0 && lp.lower[j].is_infinite())
    });
    let ctd: f64 = lp.c.iter().zip(d).map(|(&c, &v)| c.as_f64() * v.as_f64()).sum();
    recedes && ctd < -tol * (1.0 + norm2(&lp.c).as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseMatrix;
    use crate::lp::toy_example;

    #[test]
    fn toy_converges() {
        let lp = toy_example::<f64>();
        let mut cfg = StepConfig::with_eta(0.05);
        cfg.max_iter = 100_000;
        let out = solve(&lp, &PdhgState::new(vec![1.0, 2.0], vec![2.0]), &cfg).unwrap();
        assert_eq!(out.status, Status::Optimal);
        assert!((out.state.x[1] - 0.5).abs() < 1e-6 && out.state.x[0].abs() < 1e-6);
        assert!((out.state.y[0] - 1.5).abs() < 1e-6);
    }

    #[test]
    fn optimum_start_stops_immediately() {
        let lp = toy_example::<f64>();
        let out = solve(&lp, &PdhgState::new(vec![0.0, 0.5], vec![1.5]), &StepConfig::with_eta(0.05)).unwrap();
        assert_eq!((out.status, out.state.k), (Status::Optimal, 0));
    }

    #[test]
    fn infeasible_diverges() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0], vec![1.0]]);
        let lp = StandardLp::new(a, vec![1.0, 2.0], vec![0.0]).unwrap();
        let mut cfg = StepConfig::for_lp(&lp, 0.9).unwrap();
        cfg.max_iter = 200_000;
        let out = solve(&lp, &PdhgState::zeros(&lp), &cfg).unwrap();
        assert_eq!(out.status, Status::Diverging);
    }

    #[test]
    fn restarts_converge_on_toy() {
        let lp = toy_example::<f64>();
        for restart in [Restart::Adaptive, Restart::Fixed(200)] {
            let mut cfg = StepConfig::with_eta(0.05);
            cfg.restart = restart;
            let out = solve(&lp, &PdhgState::new(vec![1.0, 2.0], vec![2.0]), &cfg).unwrap();
            assert_eq!(out.status, Status::Optimal, "{restart:?}");
        }
    }

    #[test]
    fn unbounded_primal_diverges() {
        // min −x₁ s.t. x₁ − x₂ = 0, x ≥ 0
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0, -1.0]]);
        let lp = StandardLp::new(a, vec![0.0], vec![-1.0, 0.0]).unwrap();
        let mut cfg = StepConfig::for_lp(&lp, 0.9).unwrap();
        cfg.max_iter = 200_000;
        let out = solve(&lp, &PdhgState::zeros(&lp), &cfg).unwrap();
        assert_eq!(out.status, Status::Diverging);
    }

    #[test]
    fn certificates() {
        let a = SparseMatrix::<f64>::from_dense_rows(&[vec![1.0], vec![1.0]]);
        let lp = StandardLp::new(a, vec![1.0, 2.0], vec![0.0]).unwrap();
        assert!(is_certificate(&lp, &[0.0], &[-1.0, 1.0]));
        assert!(!is_certificate(&lp, &[0.0], &[1.0, 1.0]));
        let toy = toy_example::<f64>();
        assert!(!is_certificate(&toy, &[0.0, 1.0], &[1.0]));
    }

    #[test]
    fn bounds_checked() {
        let lp = toy_example::<f64>();
        assert!(solve(&lp, &PdhgState::new(vec![-1.0, 0.0], vec![0.0]), &StepConfig::with_eta(0.05)).is_err());
    }
}
