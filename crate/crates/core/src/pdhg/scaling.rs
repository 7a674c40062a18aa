use std::time::Instant;

use crate::error::Result;
use crate::linalg::spectral_norm_estimate;
use crate::linalg::vector::norm2;
use crate::linalg::SparseMatrix;
use crate::lp::StandardLp;
use crate::pdhg::{residuals, solve, PdhgState, SolveOutcome, Status, StepConfig, Trajectory};
use crate::Scalar;

/// Ruiz equilibration passes before the final ℓ2 pass.
pub const RUIZ_PASSES: usize = 10;
/// Rounds of tolerance tightening when the scaled problem converges but the
/// original residuals do not yet meet the tolerance.
const TIGHTEN_ROUNDS: usize = 6;

/// `Ã = R A C`, `b̃ = R b`, `c̃ = C c`, bounds divided by `C`;
/// `x = C x̃`, `y = R ỹ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledLp<T> {
    pub lp: StandardLp<T>,
    pub col_scale: Vec<T>,
    pub row_scale: Vec<T>,
}

impl<T: Scalar> ScaledLp<T> {
    pub fn to_scaled(&self, z: &PdhgState<T>) -> PdhgState<T> {
        let x = z.x.iter().zip(&self.col_scale).enumerate().map(|(j, (&v, &s))| self.lp.clamp(j, v / s)).collect();
        let y = z.y.iter().zip(&self.row_scale).map(|(&v, &s)| v / s).collect();
        PdhgState { x, y, k: z.k }
    }

    pub fn to_original(&self, z: &PdhgState<T>, original: &StandardLp<T>) -> PdhgState<T> {
        let x = z.x.iter().zip(&self.col_scale).enumerate().map(|(j, (&v, &s))| original.clamp(j, v * s)).collect();
        let y = z.y.iter().zip(&self.row_scale).map(|(&v, &s)| v * s).collect();
        PdhgState { x, y, k: z.k }
    }
}

fn col_norms<T: Scalar>(a: &SparseMatrix<T>, inf: bool) -> (Vec<T>, Vec<T>) {
    let mut rows = vec![T::zero(); a.n_rows()];
    let mut cols = vec![T::zero(); a.n_cols()];
    for j in 0..a.n_cols() {
        for (i, v) in a.column(j) {
            let v = v.abs();
            if inf {
                rows[i] = rows[i].max(v);
                cols[j] = cols[j].max(v);
            } else {
                rows[i] = rows[i] + v;
                cols[j] = cols[j] + v;
            }
        }
    }
    (rows, cols)
}

fn apply<T: Scalar>(a: &SparseMatrix<T>, r: &[T], c: &[T]) -> SparseMatrix<T> {
    let t: Vec<(usize, usize, T)> = a.triplets().into_iter().map(|(i, j, v)| (i, j, r[i] * v * c[j])).collect();
    SparseMatrix::from_triplets(a.n_rows(), a.n_cols(), &t).expect("same pattern")
}

/// Ruiz equilibration followed by one ℓ1-based (Pock–Chambolle, α = 1) pass.
pub fn scale_lp<T: Scalar>(lp: &StandardLp<T>, ruiz_passes: usize) -> ScaledLp<T> {
    let (m, n) = (lp.n_rows(), lp.n_cols());
    let mut row = vec![T::one(); m];
    let mut col = vec![T::one(); n];
    let mut a = lp.a.clone();
    let inv_sqrt = |v: T| if v > T::zero() { T::one() / v.sqrt() } else { T::one() };
    for pass in 0..=ruiz_passes {
        let (rn, cn) = col_norms(&a, pass < ruiz_passes);
        let r: Vec<T> = rn.into_iter().map(inv_sqrt).collect();
        let c: Vec<T> = cn.into_iter().map(inv_sqrt).collect();
        a = apply(&a, &r, &c);
        row.iter_mut().zip(&r).for_each(|(s, &v)| *s = *s * v);
        col.iter_mut().zip(&c).for_each(|(s, &v)| *s = *s * v);
    }
    let b = lp.b.iter().zip(&row).map(|(&v, &s)| v * s).collect();
    let c = lp.c.iter().zip(&col).map(|(&v, &s)| v * s).collect();
    let lower = lp.lower.iter().zip(&col).map(|(&v, &s)| v / s).collect();
    let upper = lp.upper.iter().zip(&col).map(|(&v, &s)| v / s).collect();
    let scaled = StandardLp::with_bounds(a, b, c, lower, upper).expect("scaling preserves validity");
    ScaledLp { lp: scaled, col_scale: col, row_scale: row }
}

/// Solves a diagonally rescaled copy of `lp` and maps the result back.
///
/// The step size is recomputed for the scaled matrix with `cfg.safety`; when
/// `cfg.adaptive_weight` is set the initial primal weight is `‖c̃‖/‖b̃‖`.
/// Termination is judged on the original problem: if the scaled solve
/// converges but the unscaled residuals exceed `cfg.tol`, the inner
/// tolerance is tightened and the solve resumes from where it stopped.
pub fn solve_scaled<T: Scalar>(lp: &StandardLp<T>, z0: &PdhgState<T>, cfg: &StepConfig<T>) -> Result<SolveOutcome<T>> {
    let start = Instant::now();
    let sc = scale_lp(lp, RUIZ_PASSES);
    let mut inner = cfg.clone();
    let norm = spectral_norm_estimate(&sc.lp.a, T::of(1e-4))?;
    inner.eta = if norm > T::zero() { T::of(cfg.safety) / norm } else { T::one() };
    if cfg.adaptive_weight {
        let (nc, nb) = (norm2(&sc.lp.c).as_f64(), norm2(&sc.lp.b).as_f64());
        if nc > 1e-10 && nb > 1e-10 {
            inner.primal_weight = nc / nb;
        }
    }
    let mut z = sc.to_scaled(z0);
    let mut restarts = 0;
    let mut traj = Trajectory::new(cfg.record_stride.unwrap_or(1).max(1));
    for round in 0..=TIGHTEN_ROUNDS {
        inner.max_iter = cfg.max_iter.saturating_sub(z.k - z0.k);
        inner.time_limit = cfg.time_limit.map(|t| t.saturating_sub(start.elapsed()));
        let out = solve(&sc.lp, &z, &inner)?;
        restarts += out.restarts;
        traj.snapshots.extend(out.trajectory.snapshots.iter().map(|s| sc.to_original(s, lp)));
        let orig = sc.to_original(&out.state, lp);
        let res = residuals(lp, &orig);
        let done = out.status != Status::Optimal || res.within(cfg.tol) || round == TIGHTEN_ROUNDS || inner.max_iter == 0;
        if done {
            let status = if out.status == Status::Optimal && !res.within(cfg.tol) { Status::IterLimit } else { out.status };
            return Ok(SolveOutcome { state: orig, status, trajectory: traj, residuals: res, restarts });
        }
        inner.tol = (inner.tol * (cfg.tol / res.max()).min(0.5)).max(1e-15);
        z = out.state;
    }
    unreachable!("loop returns on its last round")
}
