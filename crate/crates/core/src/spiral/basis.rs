use serde::Serialize;

use crate::lp::StandardLp;
use crate::pdhg::PdhgState;
use crate::Scalar;

/// `B` and `N`, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BasisPartition {
    pub basic: Vec<usize>,
    pub nonbasic: Vec<usize>,
}

impl BasisPartition {
    pub fn n(&self) -> usize {
        self.basic.len() + self.nonbasic.len()
    }

    pub fn is_basic(&self, j: usize) -> bool {
        self.basic.binary_search(&j).is_ok()
    }
}

/// Whether column `j` is non-basic: at its lower bound with positive reduced
/// cost, or at its upper bound with negative reduced cost.
fn nonbasic_at<T: Scalar>(lp: &StandardLp<T>, x: T, r: T, j: usize) -> bool {
    (x == lp.lower[j] && r > T::zero()) || (x == lp.upper[j] && r < T::zero())
}

/// PDHG basis of `z` with exact tests: `j ∈ N` iff `x_j` sits on a bound and
/// the reduced cost `c_j − A_jᵀy` pushes it outward strictly.
///
/// For `x ≥ 0` this is `B = {x_j > 0} ∪ {x_j = 0, c_j − A_jᵀy ≤ 0}`.
pub fn classify_basis<T: Scalar>(z: &PdhgState<T>, lp: &StandardLp<T>) -> BasisPartition {
    let r = lp.reduced_costs(&z.y);
    let (mut basic, mut nonbasic) = (Vec::new(), Vec::new());
    for j in 0..lp.n_cols() {
        if nonbasic_at(lp, z.x[j], r[j], j) {
            nonbasic.push(j);
        } else {
            basic.push(j);
        }
    }
    BasisPartition { basic, nonbasic }
}

/// Diagnostic reason a basic variable hit its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeavingLabel {
    /// The spiral center lies outside the bound.
    CenterOutsideBounds,
    /// The ray moves the coordinate toward the bound.
    RayHitsBound,
    /// Center inside and ray not pushing outward: the rotation reaches the bound.
    RadiusTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChangeEvent {
    /// Iteration of the first iterate with the new basis.
    pub iter: usize,
    pub leaving: Vec<usize>,
    pub entering: Vec<usize>,
    /// One label per leaving index, filled in when the phase spiral is known.
    pub labels: Vec<LeavingLabel>,
}

/// Compares the basis of `z` with the basis after the step to `z_next`.
///
/// Leaving: `j ∈ B` with `x⁺_j` on a bound and the reduced cost pushing
/// outward. Entering: `j ∈ N` whose reduced cost no longer pushes outward.
pub fn classify_basis_change<T: Scalar>(z: &PdhgState<T>, z_next: &PdhgState<T>, lp: &StandardLp<T>) -> Option<BasisChangeEvent> {
    let before = classify_basis(z, lp);
    let r = lp.reduced_costs(&z_next.y);
    let leaving: Vec<usize> = before.basic.iter().copied().filter(|&j| nonbasic_at(lp, z_next.x[j], r[j], j)).collect();
    let entering: Vec<usize> = before
        .nonbasic
        .iter()
        .copied()
        .filter(|&j| {
            let at_upper = z.x[j] == lp.upper[j] && z.x[j] != lp.lower[j];
            if at_upper {
                r[j] >= T::zero()
            } else {
                r[j] <= T::zero()
            }
        })
        .collect();
    if leaving.is_empty() && entering.is_empty() {
        return None;
    }
    Some(BasisChangeEvent { iter: z_next.k, leaving, entering, labels: Vec::new() })
}
