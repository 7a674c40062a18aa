//! The PDHG iteration, its termination test, trajectories and the infimal
//! displacement vector.

mod idv;
mod scaling;
mod solve;
mod state;
mod step;

pub use idv::{estimate_idv, IdvEstimate};
pub use scaling::{scale_lp, solve_scaled, ScaledLp, RUIZ_PASSES};
pub use solve::{solve, SolveOutcome, Status};
pub use state::{PdhgState, Residuals, Restart, StepConfig, Trajectory, DEFAULT_SAFETY};
pub use step::{m_norm, pdhg_step, residuals};
