//! Crossover from an optimal PDHG solution to an optimal vertex: primal push,
//! dual push and a two-stage LU basis completion, all driven by spiral-ray
//! directions computed from perturbed least-squares problems.

mod dual;
mod primal;
mod run;
mod sets;
mod types;
mod vertex;

pub use dual::{build_dual_aux, dual_direction, dual_push, DualPush};
pub use primal::{build_primal_aux, primal_direction, primal_push, AUX_RETRIES, ZERO_DIRECTION};
pub use run::run_crossover;
pub use sets::{identify_dual_sets, identify_sets};
pub use types::{support, CrossoverConfig, CrossoverResult, CrossoverState, CrossoverStatus, Perturbation, PushStep, VertexReport};
pub use vertex::{basic_solution, complete_basis, independence_check, verify_vertex};
