//! PDHG for linear programs, the spiral geometry of its iterates, and a
//! crossover that turns an optimal PDHG solution into an optimal vertex.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the common double-precision case.

pub mod bench;
pub mod crossover;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod pdhg;
mod scalar;
pub mod spiral;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, SparseMatrix};
pub use lp::{GeneralLp, ReformulatedLp, StandardLp};
pub use scalar::Scalar;

pub type SparseMatrix64 = SparseMatrix<f64>;
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type StandardLp64 = StandardLp<f64>;
pub type GeneralLp64 = GeneralLp<f64>;
pub type ReformulatedLp64 = ReformulatedLp<f64>;
pub type PdhgState64 = pdhg::PdhgState<f64>;
pub type StepConfig64 = pdhg::StepConfig<f64>;
pub type SpiralRay64 = spiral::SpiralRay<f64>;
pub type Phase64 = spiral::Phase<f64>;
pub type CrossoverResult64 = crossover::CrossoverResult<f64>;
