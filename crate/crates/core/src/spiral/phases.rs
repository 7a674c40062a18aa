use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::LsOptions;
use crate::lp::StandardLp;
use crate::pdhg::Trajectory;
use crate::spiral::{classify_basis, classify_basis_change, gap_drift, spiral_of_phase, BasisChangeEvent, BasisPartition, LeavingLabel, SpiralRay};
use crate::Scalar;

/// A maximal run of iterates sharing one basis and connected by steps that
/// are affine on that basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Phase<T> {
    pub start_iter: usize,
    pub end_iter: usize,
    pub basis: BasisPartition,
    /// Computed from the first iterate of the phase.
    pub spiral: SpiralRay<T>,
    /// Basis change into the next phase, if any.
    pub exit: Option<BasisChangeEvent>,
    /// Basic variables whose step into the next phase was cut by the
    /// projection while the basis stayed the same.
    pub clamped: Vec<usize>,
}

/// Basic variables of `basis` whose unprojected update from `z` leaves the box.
fn clamped_basics<T: Scalar>(lp: &StandardLp<T>, basis: &BasisPartition, z: &crate::pdhg::PdhgState<T>, eta: T) -> Vec<usize> {
    basis
        .basic
        .iter()
        .copied()
        .filter(|&j| {
            let v = z.x[j] - eta * (lp.c[j] - lp.a.col_dot(j, &z.y));
            v < lp.lower[j] || v > lp.upper[j]
        })
        .collect()
}

fn label<T: Scalar>(lp: &StandardLp<T>, s: &SpiralRay<T>, x_after: T, j: usize) -> LeavingLabel {
    let at_upper = x_after == lp.upper[j] && x_after != lp.lower[j];
    // orient so that "outward" is negative
    let (center, ray) = if at_upper {
        (lp.upper[j] - s.center_x[j], -s.dir_x[j])
    } else {
        (s.center_x[j] - lp.lower[j], s.dir_x[j])
    };
    if center < T::zero() {
        LeavingLabel::CenterOutsideBounds
    } else if ray < T::zero() {
        LeavingLabel::RayHitsBound
    } else {
        LeavingLabel::RadiusTooLarge
    }
}

/// Splits a stride-1 trajectory into phases and computes each phase's spiral.
pub fn segment_phases<T: Scalar>(traj: &Trajectory<T>, lp: &StandardLp<T>, eta: T, opts: &LsOptions) -> Result<Vec<Phase<T>>> {
    if traj.record_stride != 1 {
        return Err(Error::Strided(traj.record_stride));
    }
    let snaps = &traj.snapshots;
    if snaps.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(w) = snaps.windows(2).find(|w| w[1].k != w[0].k + 1) {
        return Err(Error::Invalid(format!("trajectory jumps from iteration {} to {}", w[0].k, w[1].k)));
    }
    let bases: Vec<BasisPartition> = snaps.iter().map(|z| classify_basis(z, lp)).collect();
    let mut phases = Vec::new();
    let mut start = 0;
    for t in 1..=snaps.len() {
        let mut clamped = Vec::new();
        if t < snaps.len() && bases[t] == bases[start] {
            clamped = clamped_basics(lp, &bases[start], &snaps[t - 1], eta);
            if clamped.is_empty() {
                continue;
            }
        }
        let spiral = spiral_of_phase(lp, &bases[start], &snaps[start], eta, opts)?;
        let exit = (t < snaps.len() && clamped.is_empty()).then(|| {
            let mut ev = classify_basis_change(&snaps[t - 1], &snaps[t], lp).unwrap_or(BasisChangeEvent {
                iter: snaps[t].k,
                leaving: Vec::new(),
                entering: Vec::new(),
                labels: Vec::new(),
            });
            ev.labels = ev.leaving.iter().map(|&j| label(lp, &spiral, snaps[t].x[j], j)).collect();
            ev
        });
        phases.push(Phase { start_iter: snaps[start].k, end_iter: snaps[t - 1].k, basis: bases[start].clone(), spiral, exit, clamped });
        start = t;
    }
    Ok(phases)
}

/// Phase list as JSON: start, end, basic indices, center, direction, gap
/// drift and the exit event.
pub fn phases_json<T: Scalar + Serialize>(lp: &StandardLp<T>, phases: &[Phase<T>]) -> Value {
    let items: Vec<Value> = phases
        .iter()
        .map(|p| {
            json!({
                "start": p.start_iter,
                "end": p.end_iter,
                "basic_indices": p.basis.basic,
                "center": { "x": p.spiral.center_x, "y": p.spiral.center_y },
                "direction": { "x": p.spiral.dir_x, "y": p.spiral.dir_y },
                "gap_drift": gap_drift(lp, &p.spiral).as_f64(),
                "events": p.exit.iter().collect::<Vec<_>>(),
                "clamped": p.clamped,
            })
        })
        .collect();
    Value::Array(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::toy_example;
    use crate::pdhg::{solve, PdhgState, StepConfig};

    fn toy_phases() -> (StandardLp<f64>, Vec<Phase<f64>>) {
        let lp = toy_example::<f64>();
        let mut cfg = StepConfig::with_eta(0.05);
        cfg.record_stride = Some(1);
        let out = solve(&lp, &PdhgState::new(vec![1.0, 2.0], vec![2.0]), &cfg).unwrap();
        let phases = segment_phases(&out.trajectory, &lp, 0.05, &LsOptions::default()).unwrap();
        (lp, phases)
    }

    #[test]
    fn toy_has_four_phases() {
        let (_, phases) = toy_phases();
        let seq: Vec<Vec<usize>> = phases.iter().map(|p| p.basis.basic.clone()).collect();
        assert_eq!(seq, vec![vec![0, 1], vec![1], vec![], vec![1]]);
        // leaving event x₁ → 0 ends phase 1, entering x₂ ends phase 3
        assert_eq!(phases[0].exit.as_ref().unwrap().leaving, vec![0]);
        assert_eq!(phases[2].exit.as_ref().unwrap().entering, vec![1]);
        assert!(phases[3].exit.is_none());
    }

    #[test]
    fn toy_phases_two_and_four_share_center() {
        let (_, phases) = toy_phases();
        let (a, b) = (&phases[1].spiral, &phases[3].spiral);
        assert!((a.center_x[1] - b.center_x[1]).abs() < 1e-12);
        assert!((a.center_y[0] - b.center_y[0]).abs() < 1e-12);
        assert!(a.direction_norm() < 1e-15 && b.direction_norm() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let (lp, phases) = toy_phases();
        let v = phases_json(&lp, &phases);
        let arr = v.as_array().unwrap();
        assert_eq!(arr.len(), 4);
        assert!(arr.iter().all(|p| p["gap_drift"].as_f64().unwrap() <= 0.0));
        assert_eq!(arr[0]["basic_indices"], json!([0, 1]));
    }

    #[test]
    fn strided_rejected() {
        let lp = toy_example::<f64>();
        let traj = Trajectory::<f64>::new(2);
        assert!(matches!(segment_phases(&traj, &lp, 0.05, &LsOptions::default()), Err(Error::Strided(2))));
    }

    #[test]
    fn fixed_point_is_one_phase() {
        let lp = toy_example::<f64>();
        let mut traj = Trajectory::new(1);
        let mut z = PdhgState::new(vec![0.0, 0.5], vec![1.5]);
        for _ in 0..5 {
            traj.snapshots.push(z.clone());
            z = crate::pdhg::pdhg_step(&z, &lp, 0.05).unwrap();
        }
        assert_eq!(segment_phases(&traj, &lp, 0.05, &LsOptions::default()).unwrap().len(), 1);
    }
}
