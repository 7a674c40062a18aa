//! Problem representations, MPS ingestion and the full-row-rank reformulation.

mod model;
mod mps;
mod reform;

pub use model::{toy_example, GeneralLp, StandardLp};
pub use mps::{parse_mps, parse_mps_str};
pub use reform::{reformulate, ReformulatedLp, DEFAULT_SHIFT};
