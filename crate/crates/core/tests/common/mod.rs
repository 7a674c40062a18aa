#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spiral_lp::linalg::{spectral_norm_estimate, LsOptions, SparseMatrix};
use spiral_lp::lp::StandardLp;
use spiral_lp::pdhg::{solve, PdhgState, StepConfig};
use spiral_lp::spiral::{closed_form_path, segment_phases, Phase};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Nonnegative vector with roughly half the entries exactly zero.
pub fn sparse_nonneg(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..2.0) }).collect()
}

/// Dense Gaussian `A` (m ≤ 5, n ≤ 8) with `b = A x̄`, `c = Aᵀȳ + s̄` for
/// nonnegative `x̄`, `s̄`, so the LP is feasible and bounded.
pub fn random_standard_lp(rng: &mut ChaCha8Rng) -> StandardLp<f64> {
    let m = rng.gen_range(1..=5);
    let n = rng.gen_range(m.max(2)..=8);
    let rows: Vec<Vec<f64>> = (0..m).map(|_| gaussian(rng, n)).collect();
    let a = SparseMatrix::from_dense_rows(&rows);
    let b = a.mul_vec(&sparse_nonneg(rng, n));
    let y = gaussian(rng, m);
    let s = sparse_nonneg(rng, n);
    let c = a.tr_mul_vec(&y).iter().zip(&s).map(|(u, v)| u + v).collect();
    StandardLp::new(a, b, c).unwrap()
}

pub fn default_eta(lp: &StandardLp<f64>) -> f64 {
    0.9 / spectral_norm_estimate(&lp.a, 1e-4).unwrap()
}

pub struct PhaseRun {
    pub lp: StandardLp<f64>,
    pub eta: f64,
    pub snapshots: Vec<PdhgState<f64>>,
    pub phases: Vec<Phase<f64>>,
}

/// Runs plain PDHG with stride-1 recording and segments the trajectory.
pub fn phase_run(lp: StandardLp<f64>, z0: PdhgState<f64>, max_iter: usize) -> PhaseRun {
    let eta = default_eta(&lp);
    let mut cfg = StepConfig::with_eta(eta);
    cfg.max_iter = max_iter;
    cfg.tol = 1e-10;
    cfg.record_stride = Some(1);
    let out = solve(&lp, &z0, &cfg).unwrap();
    let phases = segment_phases(&out.trajectory, &lp, eta, &LsOptions::default()).unwrap();
    PhaseRun { lp, eta, snapshots: out.trajectory.snapshots, phases }
}

pub fn random_phase_run(seed: u64, max_iter: usize) -> PhaseRun {
    let mut r = rng(seed);
    let lp = random_standard_lp(&mut r);
    let x0: Vec<f64> = (0..lp.n_cols()).map(|_| r.gen_range(0.0..2.0)).collect();
    let y0 = gaussian(&mut r, lp.n_rows());
    phase_run(lp, PdhgState::new(x0, y0), max_iter)
}

/// Largest componentwise gap between closed-form and actual iterates over
/// every phase.
pub fn closed_form_error(run: &PhaseRun) -> f64 {
    let k0 = run.snapshots[0].k;
    let mut worst: f64 = 0.0;
    for p in &run.phases {
        let start = &run.snapshots[p.start_iter - k0];
        let path = closed_form_path(&run.lp, &p.spiral, start, p.end_iter - p.start_iter).unwrap();
        for (cf, actual) in path.iter().zip(&run.snapshots[p.start_iter - k0..=p.end_iter - k0]) {
            for (u, v) in cf.x.iter().chain(&cf.y).zip(actual.x.iter().chain(&actual.y)) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    worst
}
