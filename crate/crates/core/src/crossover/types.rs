use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::vector::norm_inf;
use crate::linalg::LsOptions;
use crate::lp::StandardLp;
use crate::pdhg::Residuals;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverConfig {
    /// Weight of the reduced cost in the identification rule.
    pub gamma: f64,
    pub eps: f64,
    pub seed: u64,
    pub time_limit: Duration,
    /// Tolerance for the auxiliary LP solves.
    pub aux_tol: f64,
    pub aux_max_iter: usize,
    /// Auxiliary LP solves in the primal push before the OLS rounds.
    pub aux_lps: usize,
    pub ols: LsOptions,
    /// Cap on OLS rounds per push; `None` means the number of columns.
    pub max_push_rounds: Option<usize>,
    /// Support is counted over the first this-many columns; `None` counts all.
    pub counted_columns: Option<usize>,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            eps: 1e-8,
            seed: 0,
            time_limit: Duration::from_secs(300),
            aux_tol: 1e-8,
            aux_max_iter: 1_000_000,
            aux_lps: 1,
            ols: LsOptions::default(),
            max_push_rounds: None,
            counted_columns: None,
        }
    }
}

impl CrossoverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.eps > 0.0 && self.aux_tol > 0.0) {
            return Err(Error::Invalid(format!("gamma {}, eps {} and aux_tol {} must be positive", self.gamma, self.eps, self.aux_tol)));
        }
        Ok(())
    }
}

/// Where a column sits relative to its bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
    /// `l = u`: no sign condition on the reduced cost.
    Fixed,
    Between,
}

pub(crate) fn side<T: Scalar>(lp: &StandardLp<T>, x: &[T], j: usize) -> Side {
    let (l, u) = (lp.lower[j], lp.upper[j]);
    if l == u {
        Side::Fixed
    } else if x[j] == l {
        Side::Lower
    } else if x[j] == u {
        Side::Upper
    } else {
        Side::Between
    }
}

/// Dual slack of a column at a bound: `r_j` at its lower bound, `−r_j` at its
/// upper bound. `None` for columns with no sign condition.
pub(crate) fn dual_slack<T: Scalar>(lp: &StandardLp<T>, x: &[T], r: &[T], j: usize) -> Option<T> {
    match side(lp, x, j) {
        Side::Lower => Some(r[j]),
        Side::Upper => Some(-r[j]),
        Side::Fixed | Side::Between => None,
    }
}

/// Number of columns in `0..cols` more than `eps` away from both bounds.
pub fn support<T: Scalar>(lp: &StandardLp<T>, x: &[T], cols: usize, eps: f64) -> usize {
    let eps = T::of(eps);
    (0..cols.min(x.len())).filter(|&j| x[j] - lp.lower[j] > eps && lp.upper[j] - x[j] > eps).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverState<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Columns strictly inside their bounds.
    pub basic: Vec<usize>,
    /// Columns fixed at a bound.
    pub at_bound: Vec<usize>,
    /// Active dual constraints.
    pub active: Vec<usize>,
    /// Inactive dual constraints.
    pub inactive: Vec<usize>,
    pub round: usize,
}

/// Seeded source of the cost and right-hand-side perturbations.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub delta_c: Vec<f64>,
    pub delta_b: Vec<f64>,
    rng: ChaCha8Rng,
}

impl Perturbation {
    pub fn new(seed: u64) -> Self {
        Self { delta_c: Vec::new(), delta_b: Vec::new(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn resample_cost(&mut self, len: usize) {
        self.delta_c = (0..len).map(|_| self.rng.gen::<f64>()).collect();
    }

    pub fn resample_rhs(&mut self, len: usize) {
        self.delta_b = (0..len).map(|_| self.rng.gen::<f64>()).collect();
    }

    /// `c̃_B = c_B/(‖c_B‖∞ + 1) + δ_c`. The random part is negated on columns
    /// bounded only from above so that it still penalizes their recession
    /// direction.
    pub fn cost<T: Scalar>(&self, lp: &StandardLp<T>, basic: &[usize]) -> Vec<T> {
        assert_eq!(self.delta_c.len(), basic.len(), "cost perturbation not sampled for this basis");
        let cb: Vec<T> = basic.iter().map(|&j| lp.c[j]).collect();
        let s = T::one() / (norm_inf(&cb) + T::one());
        basic
            .iter()
            .zip(&cb)
            .zip(&self.delta_c)
            .map(|((&j, &c), &d)| {
                let d = if lp.lower[j] == T::neg_infinity() && lp.upper[j].is_finite() { -d } else { d };
                c * s + T::of(d)
            })
            .collect()
    }

    /// `b̃ = b/(‖b‖∞ + 1) + δ_b`.
    pub fn rhs<T: Scalar>(&self, lp: &StandardLp<T>) -> Vec<T> {
        assert_eq!(self.delta_b.len(), lp.n_rows(), "rhs perturbation not sampled");
        let s = T::one() / (norm_inf(&lp.b) + T::one());
        lp.b.iter().zip(&self.delta_b).map(|(&b, &d)| b * s + T::of(d)).collect()
    }
}

/// One ratio-test move along a push direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PushStep<T> {
    pub direction: Vec<T>,
    pub theta: T,
    pub blocking: Vec<usize>,
    /// Objective change caused by the step (`cᵀx` or the dual objective).
    pub objective_change: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverStatus {
    Vertex,
    PrimalOnly,
    Timeout,
    Failed,
}

impl CrossoverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Vertex => "vertex",
            Self::PrimalOnly => "primal_only",
            Self::Timeout => "timeout",
            Self::Failed => "failed",
        }
    }
}

/// Outcome of [`verify_vertex`](crate::crossover::verify_vertex), one flag per
/// condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexReport {
    pub nonsingular: bool,
    /// `‖A x − b‖∞ / (1 + ‖b‖∞)`
    pub primal_residual: f64,
    pub bound_violation: f64,
    pub nonbasic_at_bounds: bool,
    /// `‖A_Bᵀ y − c_B‖∞ / (1 + ‖c‖∞)`
    pub dual_residual: f64,
    /// Most negative dual slack over nonbasic columns, relative to `1 + ‖c‖∞`.
    pub dual_violation: f64,
    pub gap: f64,
}

impl VertexReport {
    pub const TOL: f64 = 1e-8;
    pub const GAP_TOL: f64 = 1e-7;

    pub fn primal_ok(&self) -> bool {
        self.nonsingular && self.primal_residual <= Self::TOL && self.bound_violation <= Self::TOL && self.nonbasic_at_bounds
    }

    pub fn dual_ok(&self) -> bool {
        self.nonsingular && self.dual_residual <= Self::TOL && self.dual_violation <= Self::TOL
    }

    pub fn passed(&self) -> bool {
        self.primal_ok() && self.dual_ok() && self.gap <= Self::GAP_TOL
    }
}

fn secs<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverResult<T> {
    pub status: CrossoverStatus,
    pub basis: Vec<usize>,
    pub support_before: usize,
    pub support_after: usize,
    pub objective_in: f64,
    pub objective_out: f64,
    pub residuals: Residuals,
    /// OLS rounds in the primal and dual pushes.
    pub rounds: usize,
    #[serde(rename = "wall_time_sec", serialize_with = "secs")]
    pub wall_time: Duration,
    pub verification: Option<VertexReport>,
    pub message: Option<String>,
    #[serde(skip)]
    pub x: Vec<T>,
    #[serde(skip)]
    pub y: Vec<T>,
    #[serde(skip)]
    pub primal_steps: Vec<PushStep<T>>,
    #[serde(skip)]
    pub dual_steps: Vec<PushStep<T>>,
}
