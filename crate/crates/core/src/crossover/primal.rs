use std::time::Instant;

use crate::crossover::types::{CrossoverConfig, CrossoverState, Perturbation, PushStep};
use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm2, norm_inf};
use crate::linalg::{least_squares_with, LsOptions};
use crate::lp::StandardLp;
use crate::pdhg::{solve_scaled, PdhgState, Restart, Status, StepConfig};
use crate::Scalar;

/// A direction is treated as zero below this fraction of its right-hand side.
pub const ZERO_DIRECTION: f64 = 1e-9;
/// Resamples allowed when an auxiliary LP fails.
pub const AUX_RETRIES: usize = 5;

pub(crate) fn check_deadline(deadline: Instant) -> Result<()> {
    if Instant::now() >= deadline {
        Err(Error::TimeLimit)
    } else {
        Ok(())
    }
}

/// Restarted, rescaled PDHG settings for auxiliary problems.
pub(crate) fn aux_config<T: Scalar>(cfg: &CrossoverConfig, deadline: Instant) -> StepConfig<T> {
    let mut sc = StepConfig::with_eta(T::one());
    sc.tol = cfg.aux_tol;
    sc.max_iter = cfg.aux_max_iter;
    sc.restart = Restart::Adaptive;
    sc.adaptive_weight = true;
    sc.time_limit = Some(deadline.saturating_duration_since(Instant::now()));
    sc
}

/// `b − Σ_{j∉B} A_j x_j`: what the basic columns must produce.
pub(crate) fn basic_rhs<T: Scalar>(lp: &StandardLp<T>, basic: &[usize], x: &[T]) -> Vec<T> {
    let mut xn = x.to_vec();
    basic.iter().for_each(|&j| xn[j] = T::zero());
    let ax = lp.a.mul_vec(&xn);
    lp.b.iter().zip(&ax).map(|(&b, &v)| b - v).collect()
}

/// `min c̃_Bᵀx_B  s.t.  A_B x_B = b − A_E x_E,  l_B ≤ x_B ≤ u_B`.
pub fn build_primal_aux<T: Scalar>(lp: &StandardLp<T>, basic: &[usize], x: &[T], pert: &Perturbation) -> Result<StandardLp<T>> {
    let a = lp.a.select_columns(basic);
    let lower = basic.iter().map(|&j| lp.lower[j]).collect();
    let upper = basic.iter().map(|&j| lp.upper[j]).collect();
    StandardLp::with_bounds(a, basic_rhs(lp, basic, x), pert.cost(lp, basic), lower, upper)
}

/// Spiral-ray direction `−(c̃_B − A_Bᵀy*)` with `y*` minimizing
/// `‖A_Bᵀy − c̃_B‖₂`, scattered into a full-length vector. Zero when `c̃_B` lies
/// in the row space of `A_B`; negated when nonnegative so that it points at a
/// lower bound.
pub fn primal_direction<T: Scalar>(lp: &StandardLp<T>, basic: &[usize], pert: &Perturbation, opts: &LsOptions) -> Result<Vec<T>> {
    let mut dir = vec![T::zero(); lp.n_cols()];
    if basic.is_empty() {
        return Ok(dir);
    }
    let ct = pert.cost(lp, basic);
    let abt = lp.a.select_columns(basic).transpose();
    let ys = least_squares_with(&abt, &ct, opts)?.solution;
    let fit = abt.mul_vec(&ys);
    let d: Vec<T> = ct.iter().zip(&fit).map(|(&c, &f)| f - c).collect();
    if norm2(&d) <= T::of(ZERO_DIRECTION) * norm2(&ct) {
        return Ok(dir);
    }
    let sign = if d.iter().all(|&v| v >= T::zero()) { -T::one() } else { T::one() };
    for (&j, &v) in basic.iter().zip(&d) {
        dir[j] = sign * v;
    }
    Ok(dir)
}

/// Largest step along `dir` keeping the basic columns inside their bounds,
/// with the indices that block it.
fn ratio_test<T: Scalar>(lp: &StandardLp<T>, basic: &[usize], x: &[T], dir: &[T]) -> Option<(T, Vec<usize>)> {
    let tiny = T::of(1e-12) * norm_inf(dir);
    let ratios: Vec<(usize, T)> = basic
        .iter()
        .filter_map(|&j| {
            let d = dir[j];
            if d < -tiny && lp.lower[j].is_finite() {
                Some((j, ((x[j] - lp.lower[j]) / -d).max(T::zero())))
            } else if d > tiny && lp.upper[j].is_finite() {
                Some((j, ((lp.upper[j] - x[j]) / d).max(T::zero())))
            } else {
                None
            }
        })
        .collect();
    let theta = ratios.iter().map(|r| r.1).fold(T::infinity(), T::min);
    if !theta.is_finite() {
        return None;
    }
    let cut = theta + T::of(1e-12) * theta.max(T::one());
    Some((theta, ratios.into_iter().filter(|r| r.1 <= cut).map(|r| r.0).collect()))
}

/// Minimal-norm correction of `x` on `cols` so that the basic columns
/// reproduce their right-hand side. Returns false, leaving `x` untouched, if
/// the corrected point leaves the bounds.
pub(crate) fn repair_primal<T: Scalar>(lp: &StandardLp<T>, cols: &[usize], x: &mut [T], opts: &LsOptions) -> Result<bool> {
    if cols.is_empty() {
        return Ok(true);
    }
    let target = basic_rhs(lp, cols, x);
    let a = lp.a.select_columns(cols);
    let xb: Vec<T> = cols.iter().map(|&j| x[j]).collect();
    let ax = a.mul_vec(&xb);
    let resid: Vec<T> = target.iter().zip(&ax).map(|(&t, &v)| t - v).collect();
    let corr = least_squares_with(&a, &resid, opts)?.solution;
    let fixed: Vec<T> = xb.iter().zip(&corr).map(|(&v, &d)| v + d).collect();
    if cols.iter().zip(&fixed).any(|(&j, &v)| v < lp.lower[j] || v > lp.upper[j]) {
        return Ok(false);
    }
    cols.iter().zip(fixed).for_each(|(&j, v)| x[j] = v);
    Ok(true)
}

/// Moves entries of `basic` within `eps` of a bound onto it and drops them
/// from the basic set.
fn snap<T: Scalar>(lp: &StandardLp<T>, st: &mut CrossoverState<T>, eps: T) {
    let x = &mut st.x;
    let at_bound = &mut st.at_bound;
    st.basic.retain(|&j| {
        if x[j] - lp.lower[j] <= eps {
            x[j] = lp.lower[j];
        } else if lp.upper[j] - x[j] <= eps {
            x[j] = lp.upper[j];
        } else {
            return true;
        }
        at_bound.push(j);
        false
    });
    at_bound.sort_unstable();
}

fn solve_primal_aux<T: Scalar>(lp: &StandardLp<T>, st: &mut CrossoverState<T>, cfg: &CrossoverConfig, pert: &mut Perturbation, deadline: Instant) -> Result<()> {
    let mut last = Status::Optimal;
    for _ in 0..AUX_RETRIES {
        check_deadline(deadline)?;
        pert.resample_cost(st.basic.len());
        let aux = build_primal_aux(lp, &st.basic, &st.x, pert)?;
        let z0 = PdhgState::new(st.basic.iter().map(|&j| st.x[j]).collect(), vec![T::zero(); lp.n_rows()]);
        let out = solve_scaled(&aux, &z0, &aux_config(cfg, deadline))?;
        last = out.status;
        match out.status {
            Status::TimeLimit => return Err(Error::TimeLimit),
            Status::Optimal => {}
            Status::IterLimit | Status::Diverging => continue,
        }
        let mut cand = st.clone();
        st.basic.iter().zip(&out.state.x).for_each(|(&j, &v)| cand.x[j] = v);
        snap(lp, &mut cand, T::of(cfg.eps));
        if repair_primal(lp, &cand.basic, &mut cand.x, &cfg.ols)? {
            *st = cand;
            return Ok(());
        }
        log::debug!("auxiliary solution repair left the bounds; resampling");
    }
    Err(Error::Subproblem(format!("primal auxiliary LP failed {AUX_RETRIES} times (last status {last:?})")))
}

/// Primal push: one auxiliary LP (or `cfg.aux_lps` of them), then OLS ray
/// directions with ratio tests until the basic columns are independent.
pub fn primal_push<T: Scalar>(
    lp: &StandardLp<T>,
    st: &mut CrossoverState<T>,
    cfg: &CrossoverConfig,
    pert: &mut Perturbation,
    deadline: Instant,
) -> Result<Vec<PushStep<T>>> {
    if !repair_primal(lp, &st.basic, &mut st.x, &cfg.ols)? {
        log::debug!("initial point could not be repaired inside its bounds");
    }
    for _ in 0..cfg.aux_lps {
        if st.basic.is_empty() {
            break;
        }
        solve_primal_aux(lp, st, cfg, pert, deadline)?;
    }
    let mut steps = Vec::new();
    let cap = cfg.max_push_rounds.unwrap_or(lp.n_cols());
    while !st.basic.is_empty() && steps.len() < cap {
        check_deadline(deadline)?;
        pert.resample_cost(st.basic.len());
        let mut dir = primal_direction(lp, &st.basic, pert, &cfg.ols)?;
        if dir.iter().all(|&v| v == T::zero()) {
            break;
        }
        let (theta, blocking) = match ratio_test(lp, &st.basic, &st.x, &dir) {
            Some(t) => t,
            None => {
                dir.iter_mut().for_each(|v| *v = -*v);
                match ratio_test(lp, &st.basic, &st.x, &dir) {
                    Some(t) => t,
                    // a line of free columns: no bound can be reached
                    None => break,
                }
            }
        };
        st.round += 1;
        for &j in &st.basic {
            st.x[j] = lp.clamp(j, st.x[j] + theta * dir[j]);
        }
        for &j in &blocking {
            st.x[j] = if dir[j] < T::zero() { lp.lower[j] } else { lp.upper[j] };
        }
        st.basic.retain(|j| !blocking.contains(j));
        st.at_bound.extend(&blocking);
        st.at_bound.sort_unstable();
        let objective_change = theta * dot(&lp.c, &dir);
        steps.push(PushStep { direction: dir, theta, blocking, objective_change });
    }
    Ok(steps)
}
