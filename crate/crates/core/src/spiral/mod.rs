//! Geometry of PDHG iterates: bases, phases, spiral centers and rays.

mod basis;
mod phases;
mod ray;

pub use basis::{classify_basis, classify_basis_change, BasisChangeEvent, BasisPartition, LeavingLabel};
pub use phases::{phases_json, segment_phases, Phase};
pub use ray::{apply_rotation, closed_form_iterate, closed_form_path, gap_drift, spiral_of_phase, SpiralRay};
