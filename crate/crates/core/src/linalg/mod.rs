//! Linear algebra shared by the solver, the spiral analysis and crossover.
//!
//! Pseudoinverse applications are always carried out as minimal-norm least
//! squares solves; no pseudoinverse is ever formed.

mod dense;
pub mod lsmr;
mod lstsq;
mod lu;
mod power;
pub mod qr;
mod sparse;
mod svd;
pub mod vector;

pub use dense::DenseMatrix;
pub use lstsq::{
    least_squares, least_squares_with, project_kernel, project_kernel_with, LsMethod, LsOptions, LsSolveReport,
    SolveMethod, DEFAULT_DIRECT_THRESHOLD, ITERATIVE_TOL,
};
pub use lu::{lu_select_independent_columns, DenseLu, FillDiagnostics, LuSelection, PIVOT_TOL};
pub use power::{spectral_norm_estimate, POWER_MAX_ITER};
pub use sparse::SparseMatrix;
pub use svd::{svd_summary, SpectralSummary, SVD_DIM_LIMIT};
