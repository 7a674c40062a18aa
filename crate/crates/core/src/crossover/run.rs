use std::time::Instant;

use crate::crossover::dual::dual_push;
use crate::crossover::primal::{check_deadline, primal_push};
use crate::crossover::sets::{identify_dual_sets, identify_sets};
use crate::crossover::types::{support, CrossoverConfig, CrossoverResult, CrossoverStatus, Perturbation, PushStep};
use crate::crossover::vertex::{basic_solution, complete_basis, independence_check, verify_vertex};
use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::pdhg::{residuals, PdhgState};
use crate::Scalar;

struct Progress<T> {
    x: Vec<T>,
    y: Vec<T>,
    rounds: usize,
    primal_steps: Vec<PushStep<T>>,
    dual_steps: Vec<PushStep<T>>,
}

/// Primal push, dual push and the independence check, then a final solve on
/// the chosen basis and verification.
pub fn run_crossover<T: Scalar>(lp: &StandardLp<T>, z: &PdhgState<T>, cfg: &CrossoverConfig) -> Result<CrossoverResult<T>> {
    cfg.validate()?;
    z.check_dims(lp)?;
    let start = Instant::now();
    let deadline = start + cfg.time_limit;
    let cols = cfg.counted_columns.unwrap_or(lp.n_cols());
    let support_before = support(lp, &z.x, cols, cfg.eps);
    let objective_in = lp.objective(&z.x).as_f64();

    let mut prog = Progress { x: z.x.clone(), y: z.y.clone(), rounds: 0, primal_steps: Vec::new(), dual_steps: Vec::new() };
    let outcome = push_and_select(lp, z, cfg, deadline, &mut prog);
    let finish = |status: CrossoverStatus, basis: Vec<usize>, x: Vec<T>, y: Vec<T>, report, message: Option<String>, prog: Progress<T>| {
        let res = residuals(lp, &PdhgState::new(x.clone(), y.clone()));
        CrossoverResult {
            status,
            basis,
            support_before,
            support_after: support(lp, &x, cols, cfg.eps),
            objective_in,
            objective_out: lp.objective(&x).as_f64(),
            residuals: res,
            rounds: prog.rounds,
            wall_time: start.elapsed(),
            verification: report,
            message,
            x,
            y,
            primal_steps: prog.primal_steps,
            dual_steps: prog.dual_steps,
        }
    };
    let (basis, dual_complete) = match outcome {
        Ok(v) => v,
        Err(e) => {
            let status = if e == Error::TimeLimit { CrossoverStatus::Timeout } else { CrossoverStatus::Failed };
            let (x, y) = (prog.x.clone(), prog.y.clone());
            return Ok(finish(status, Vec::new(), x, y, None, Some(e.to_string()), prog));
        }
    };
    let (x, y) = match basic_solution(lp, &prog.x, &basis) {
        Ok(v) => v,
        Err(e) => {
            let (x, y) = (prog.x.clone(), prog.y.clone());
            return Ok(finish(CrossoverStatus::Failed, basis, x, y, None, Some(e.to_string()), prog));
        }
    };
    let report = verify_vertex(lp, &x, &y, &basis);
    let drift = (lp.objective(&x).as_f64() - objective_in).abs() / (1.0 + objective_in.abs());
    let (status, message) = if report.passed() && drift <= 1e-7 && dual_complete {
        (CrossoverStatus::Vertex, None)
    } else if report.primal_ok() && drift <= 1e-7 {
        (CrossoverStatus::PrimalOnly, Some("basis is primal optimal only".to_string()))
    } else {
        (CrossoverStatus::Failed, Some(format!("vertex verification failed (objective drift {drift:.2e})")))
    };
    Ok(finish(status, basis, x, y, Some(report), message, prog))
}

/// Returns the basis and whether it came from a completed dual push.
fn push_and_select<T: Scalar>(lp: &StandardLp<T>, z: &PdhgState<T>, cfg: &CrossoverConfig, deadline: Instant, prog: &mut Progress<T>) -> Result<(Vec<usize>, bool)> {
    let mut pert = Perturbation::new(cfg.seed);
    let mut st = identify_sets(z, lp, cfg);
    let steps = primal_push(lp, &mut st, cfg, &mut pert, deadline);
    prog.x.clone_from(&st.x);
    prog.primal_steps = steps?;
    prog.rounds = st.round;
    check_deadline(deadline)?;
    identify_dual_sets(lp, &mut st, cfg.eps);
    let dual = dual_push(lp, &mut st, cfg, &mut pert, deadline);
    prog.rounds = st.round;
    let full_rank = match dual {
        Ok(d) => {
            prog.dual_steps = d.steps;
            prog.y.clone_from(&st.y);
            d.full_rank
        }
        Err(Error::TimeLimit) => return Err(Error::TimeLimit),
        Err(e) => {
            log::debug!("dual push failed: {e}");
            false
        }
    };
    check_deadline(deadline)?;
    if full_rank {
        if let Ok(basis) = independence_check(lp, &st) {
            return Ok((basis, true));
        }
    }
    // primal basis only: complete from every column off the support
    let rest: Vec<usize> = (0..lp.n_cols()).filter(|j| !st.basic.contains(j)).collect();
    Ok((complete_basis(lp, &st.basic, &rest)?, false))
}
