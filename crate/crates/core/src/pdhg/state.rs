use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectral_norm_estimate;
use crate::lp::StandardLp;
use crate::Scalar;

/// Fraction of `1/‖A‖₂` used as the default step size.
pub const DEFAULT_SAFETY: f64 = 0.9;

/// A primal-dual iterate `z = (x, y)` after `k` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdhgState<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub k: usize,
}

impl<T: Scalar> PdhgState<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Self {
        Self { x, y, k: 0 }
    }

    /// `x = 0` clamped into the bounds, `y = 0`.
    pub fn zeros(lp: &StandardLp<T>) -> Self {
        let x = (0..lp.n_cols()).map(|j| lp.clamp(j, T::zero())).collect();
        Self::new(x, vec![T::zero(); lp.n_rows()])
    }

    /// `(x, y)` as one vector.
    pub fn stacked(&self) -> Vec<T> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn check_dims(&self, lp: &StandardLp<T>) -> Result<()> {
        if self.x.len() != lp.n_cols() || self.y.len() != lp.n_rows() {
            return Err(Error::Dimension(format!(
                "state is ({}, {}), problem is {}x{}",
                self.x.len(),
                self.y.len(),
                lp.n_rows(),
                lp.n_cols()
            )));
        }
        Ok(())
    }
}

/// Restart scheme for [`solve`](crate::pdhg::solve).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Restart {
    /// Plain PDHG.
    Off,
    /// Restart to the epoch average every given number of iterations.
    Fixed(usize),
    /// Restart to the epoch average (or the current iterate) when its KKT
    /// error has dropped enough since the last restart.
    Adaptive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepConfig<T> {
    pub eta: T,
    pub safety: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub restart: Restart,
    /// Primal weight `ω`: primal step `η/ω`, dual step `ηω`.
    pub primal_weight: f64,
    /// Rebalance `ω` at every restart from the primal and dual movement.
    pub adaptive_weight: bool,
    /// Record every `stride`-th iterate; `None` records nothing.
    pub record_stride: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl<T: Scalar> StepConfig<T> {
    /// Step size `safety/‖A‖₂` from a power-iteration estimate.
    pub fn for_lp(lp: &StandardLp<T>, safety: f64) -> Result<Self> {
        if !(safety > 0.0 && safety < 1.0) {
            return Err(Error::Invalid(format!("step safety factor {safety} outside (0, 1)")));
        }
        let norm = spectral_norm_estimate(&lp.a, T::of(1e-4))?;
        let eta = if norm > T::zero() { T::of(safety) / norm } else { T::one() };
        Ok(Self::with_eta(eta).safety(safety))
    }

    pub fn with_eta(eta: T) -> Self {
        Self {
            eta,
            safety: DEFAULT_SAFETY,
            max_iter: 1_000_000,
            tol: 1e-8,
            restart: Restart::Off,
            primal_weight: 1.0,
            adaptive_weight: false,
            record_stride: None,
            time_limit: None,
        }
    }

    fn safety(mut self, s: f64) -> Self {
        self.safety = s;
        self
    }
}

/// Recorded iterates, optionally strided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub snapshots: Vec<PdhgState<T>>,
    pub record_stride: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(record_stride: usize) -> Self {
        Self { snapshots: Vec::new(), record_stride }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// CSV with header `k,x_1..x_n,y_1..y_m`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        if let Some(s) = self.snapshots.first() {
            for j in 1..=s.x.len() {
                write!(out, ",x_{j}").unwrap();
            }
            for i in 1..=s.y.len() {
                write!(out, ",y_{i}").unwrap();
            }
        }
        out.push('\n');
        for s in &self.snapshots {
            write!(out, "{}", s.k).unwrap();
            for v in s.x.iter().chain(&s.y) {
                write!(out, ",{:?}", v.as_f64()).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Relative KKT residuals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub primal_res: f64,
    pub dual_res: f64,
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal_res.max(self.dual_res).max(self.gap)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.primal_res <= tol && self.dual_res <= tol && self.gap <= tol
    }
}
