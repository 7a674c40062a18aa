use std::time::Instant;

use crate::crossover::primal::{aux_config, basic_rhs, check_deadline, AUX_RETRIES, ZERO_DIRECTION};
use crate::crossover::types::{dual_slack, CrossoverConfig, CrossoverState, Perturbation, PushStep};
use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm2, norm_inf};
use crate::linalg::{least_squares_with, LsOptions};
use crate::lp::{reformulate, GeneralLp, StandardLp, DEFAULT_SHIFT};
use crate::pdhg::{solve_scaled, PdhgState, Status};
use crate::Scalar;

/// Largest equality residual `‖A_Dᵀy − c_D‖∞/(1 + ‖c‖∞)` accepted after a repair.
const REPAIR_TOL: f64 = 1e-9;

fn slack_sign<T: Scalar>(lp: &StandardLp<T>, x: &[T], j: usize) -> T {
    if x[j] == lp.upper[j] && lp.lower[j] != lp.upper[j] {
        -T::one()
    } else {
        T::one()
    }
}

/// `min Σ_{j∈N} s_j(y)  s.t.  A_Dᵀy = c_D,  s_N(y) ≥ 0` over free `y`, where
/// `s_j = ±(c_j − A_jᵀy)` is the slack signed by the bound `x_j` sits on.
/// One row per column of `D ∪ N`, `D` first.
pub fn build_dual_aux<T: Scalar>(lp: &StandardLp<T>, st: &CrossoverState<T>) -> Result<GeneralLp<T>> {
    let m = lp.n_rows();
    let rows: Vec<usize> = st.active.iter().chain(&st.inactive).copied().collect();
    let a = lp.a.select_columns(&rows).transpose();
    let (mut lo, mut hi) = (Vec::with_capacity(rows.len()), Vec::with_capacity(rows.len()));
    let mut g = vec![T::zero(); m];
    let mut offset = T::zero();
    for &j in &st.active {
        lo.push(lp.c[j]);
        hi.push(lp.c[j]);
    }
    for &j in &st.inactive {
        let s = slack_sign(lp, &st.x, j);
        if s > T::zero() {
            lo.push(T::neg_infinity());
            hi.push(lp.c[j]);
        } else {
            lo.push(lp.c[j]);
            hi.push(T::infinity());
        }
        for (i, v) in lp.a.column(j) {
            g[i] = g[i] + s * v;
        }
        offset = offset + s * lp.c[j];
    }
    let c: Vec<T> = g.into_iter().map(|v| -v).collect();
    let mut aux = GeneralLp::new(a, c, lo, hi, vec![T::neg_infinity(); m], vec![T::infinity(); m])?;
    aux.objective_offset = offset;
    Ok(aux)
}

/// Dual spiral-ray direction `b̃ − A_D x*` with `x*` minimizing `‖A_D x − b̃‖₂`.
/// Zero when `b̃` lies in the range of `A_D`.
pub fn dual_direction<T: Scalar>(lp: &StandardLp<T>, active: &[usize], pert: &Perturbation, opts: &LsOptions) -> Result<Vec<T>> {
    let bt = pert.rhs(lp);
    let a_d = lp.a.select_columns(active);
    let xs = least_squares_with(&a_d, &bt, opts)?.solution;
    let fit = a_d.mul_vec(&xs);
    let d: Vec<T> = bt.iter().zip(&fit).map(|(&b, &f)| b - f).collect();
    if norm2(&d) <= T::of(ZERO_DIRECTION) * norm2(&bt) {
        return Ok(vec![T::zero(); lp.n_rows()]);
    }
    Ok(d)
}

fn slacks<T: Scalar>(lp: &StandardLp<T>, st: &CrossoverState<T>) -> Vec<(usize, T)> {
    let r = lp.reduced_costs(&st.y);
    st.inactive.iter().map(|&j| (j, dual_slack(lp, &st.x, &r, j).unwrap_or_else(T::infinity))).collect()
}

fn move_to_active<T: Scalar>(st: &mut CrossoverState<T>, cols: &[usize]) {
    st.inactive.retain(|j| !cols.contains(j));
    st.active.extend(cols);
    st.active.sort_unstable();
}

/// Restores `A_Dᵀy = c_D` by a minimal-norm correction of `y`. Inactive
/// constraints whose slack drops to `ε` or below join `D` and the correction
/// is repeated. Returns the final relative equality residual.
pub(crate) fn repair_dual<T: Scalar>(lp: &StandardLp<T>, st: &mut CrossoverState<T>, eps: f64, opts: &LsOptions) -> Result<f64> {
    let scale = T::one() + norm_inf(&lp.c);
    loop {
        let adt = lp.a.select_columns(&st.active).transpose();
        let fit = adt.mul_vec(&st.y);
        let resid: Vec<T> = st.active.iter().zip(&fit).map(|(&j, &f)| lp.c[j] - f).collect();
        if !resid.is_empty() {
            let corr = least_squares_with(&adt, &resid, opts)?.solution;
            st.y.iter_mut().zip(&corr).for_each(|(y, &d)| *y = *y + d);
        }
        let newly: Vec<usize> = slacks(lp, st).into_iter().filter(|&(_, s)| s <= T::of(eps)).map(|(j, _)| j).collect();
        if newly.is_empty() {
            let fit = adt.mul_vec(&st.y);
            let err = st.active.iter().zip(&fit).map(|(&j, &f)| (lp.c[j] - f).abs()).fold(T::zero(), T::max);
            return Ok((err / scale).as_f64());
        }
        move_to_active(st, &newly);
    }
}

fn solve_dual_aux<T: Scalar>(lp: &StandardLp<T>, st: &mut CrossoverState<T>, cfg: &CrossoverConfig, deadline: Instant) -> Result<()> {
    let aux = build_dual_aux(lp, st)?;
    let ref_lp = reformulate(&aux, T::of(DEFAULT_SHIFT))?;
    let m = lp.n_rows();
    let z0 = PdhgState::new(ref_lp.lift(&st.y), vec![T::zero(); ref_lp.lp.n_rows()]);
    let z0 = PdhgState { x: z0.x.iter().enumerate().map(|(j, &v)| ref_lp.lp.clamp(j, v)).collect(), ..z0 };
    check_deadline(deadline)?;
    let out = solve_scaled(&ref_lp.lp, &z0, &aux_config(cfg, deadline))?;
    match out.status {
        Status::TimeLimit => return Err(Error::TimeLimit),
        Status::Optimal => {
            let mut cand = st.clone();
            cand.y = out.state.x[..m].to_vec();
            let newly: Vec<usize> = slacks(lp, &cand).into_iter().filter(|&(_, s)| s <= T::of(cfg.eps)).map(|(j, _)| j).collect();
            move_to_active(&mut cand, &newly);
            if repair_dual(lp, &mut cand, cfg.eps, &cfg.ols)? <= REPAIR_TOL && slacks(lp, &cand).iter().all(|&(_, s)| s >= T::zero()) {
                *st = cand;
                return Ok(());
            }
            log::debug!("dual auxiliary solution could not be repaired; continuing from the incoming dual point");
        }
        status => log::debug!("dual auxiliary LP stopped with {status:?}; continuing from the incoming dual point"),
    }
    Ok(())
}

/// Outcome of [`dual_push`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualPush<T> {
    pub steps: Vec<PushStep<T>>,
    /// The rows of `A_D` span the whole space, so `y` is pinned down.
    pub full_rank: bool,
}

/// Dual push: repair, one auxiliary LP, then OLS ray directions with dual
/// ratio tests until the rows of `A_D` are independent.
pub fn dual_push<T: Scalar>(
    lp: &StandardLp<T>,
    st: &mut CrossoverState<T>,
    cfg: &CrossoverConfig,
    pert: &mut Perturbation,
    deadline: Instant,
) -> Result<DualPush<T>> {
    let err = repair_dual(lp, st, cfg.eps, &cfg.ols)?;
    if err > REPAIR_TOL {
        return Err(Error::Subproblem(format!("dual equalities inconsistent after repair (residual {err:.2e})")));
    }
    if !st.inactive.is_empty() {
        solve_dual_aux(lp, st, cfg, deadline)?;
    }
    let mut steps = Vec::new();
    let cap = cfg.max_push_rounds.unwrap_or(lp.n_cols());
    let mut misses = 0;
    let target = basic_rhs(lp, &st.basic, &st.x);
    let mut full_rank = false;
    while steps.len() < cap {
        check_deadline(deadline)?;
        pert.resample_rhs(lp.n_rows());
        let mut dir = dual_direction(lp, &st.active, pert, &cfg.ols)?;
        if dir.iter().all(|&v| v == T::zero()) {
            full_rank = true;
            break;
        }
        let mut ratio = dual_ratio_test(lp, st, &dir);
        if ratio.is_none() {
            dir.iter_mut().for_each(|v| *v = -*v);
            ratio = dual_ratio_test(lp, st, &dir);
        }
        let Some((theta, blocking)) = ratio else {
            misses += 1;
            if misses >= AUX_RETRIES {
                break;
            }
            continue;
        };
        st.round += 1;
        st.y.iter_mut().zip(&dir).for_each(|(y, &d)| *y = *y + theta * d);
        let mut newly = blocking.clone();
        newly.extend(slacks(lp, st).into_iter().filter(|&(j, s)| s <= T::of(cfg.eps) && !blocking.contains(&j)).map(|(j, _)| j));
        move_to_active(st, &newly);
        let objective_change = theta * dot(&target, &dir);
        steps.push(PushStep { direction: dir, theta, blocking, objective_change });
    }
    Ok(DualPush { steps, full_rank })
}

fn dual_ratio_test<T: Scalar>(lp: &StandardLp<T>, st: &CrossoverState<T>, dir: &[T]) -> Option<(T, Vec<usize>)> {
    let atd = lp.a.tr_mul_vec(dir);
    let tiny = T::of(1e-12) * norm_inf(&atd).max(norm_inf(dir));
    let ratios: Vec<(usize, T)> = slacks(lp, st)
        .into_iter()
        .filter_map(|(j, s)| {
            // slack falls at rate sign·A_jᵀδ
            let rate = slack_sign(lp, &st.x, j) * atd[j];
            (rate > tiny && s.is_finite()).then(|| (j, s.max(T::zero()) / rate))
        })
        .collect();
    let theta = ratios.iter().map(|r| r.1).fold(T::infinity(), T::min);
    if !theta.is_finite() {
        return None;
    }
    let cut = theta + T::of(1e-12) * theta.max(T::one());
    Some((theta, ratios.into_iter().filter(|r| r.1 <= cut).map(|r| r.0).collect()))
}
