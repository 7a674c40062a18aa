use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};
use spiral_lp::bench::{bench_dir, rows_to_csv, rows_to_text, solve_reformulated, summary, PipelineConfig};
use spiral_lp::crossover::{run_crossover, CrossoverStatus};
use spiral_lp::linalg::{spectral_norm_estimate, LsOptions};
use spiral_lp::lp::{parse_mps, reformulate, GeneralLp, ReformulatedLp, DEFAULT_SHIFT};
use spiral_lp::pdhg::{estimate_idv, solve, PdhgState, Restart, SolveOutcome, Status, StepConfig};
use spiral_lp::spiral::{phases_json, segment_phases};

use crate::{Command, Common, Format};

/// Iterations of plain PDHG used for the displacement estimate of a diverging solve.
const IDV_ITERATIONS: usize = 20_000;
const IDV_WINDOW: usize = 2_000;
/// Upper bound on recorded iterations for `analyze`.
const ANALYZE_CAP: usize = 200_000;

pub fn run(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Solve { input, common, warm, trajectory, stride } => cmd_solve(&input, &common, warm.as_deref(), trajectory.as_deref(), stride),
        Command::Crossover { input, common, warm } => cmd_crossover(&input, &common, warm.as_deref()),
        Command::Analyze { input, common, warm, eta, trajectory } => cmd_analyze(&input, &common, warm.as_deref(), eta, trajectory.as_deref()),
        Command::Bench { dir, common, workers } => cmd_bench(&dir, &common, workers),
    }
}

fn pipeline_config(c: &Common) -> Result<PipelineConfig> {
    if !(c.tol > 0.0) {
        bail!("--tol must be positive, got {}", c.tol);
    }
    if !(c.time_limit >= 0.0 && c.time_limit.is_finite()) {
        bail!("--time-limit must be a finite number of seconds, got {}", c.time_limit);
    }
    if !(c.step_scale > 0.0 && c.step_scale < 1.0) {
        bail!("--step-scale must lie in (0, 1), got {}", c.step_scale);
    }
    Ok(PipelineConfig {
        tol: c.tol,
        seed: c.seed,
        time_limit: Duration::from_secs_f64(c.time_limit),
        max_iter: c.max_iter,
        safety: c.step_scale,
        ols: LsOptions { method: c.ols.into(), direct_threshold: c.direct_threshold, ..LsOptions::default() },
    })
}

fn load(path: &Path) -> Result<GeneralLp<f64>> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lp = parse_mps::<f64>(&bytes).with_context(|| format!("cannot parse {}", path.display()))?;
    if lp.name.is_empty() {
        lp.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(lp)
}

#[derive(Deserialize)]
struct Warm {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn read_warm(path: &Path) -> Result<PdhgState<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let w: Warm = serde_json::from_str(&text).with_context(|| format!("{} is not a {{x, y}} JSON object", path.display()))?;
    Ok(PdhgState::new(w.x, w.y))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(common: &Common, v: &Value) -> Result<()> {
    match common.format {
        None | Some(Format::Json) => emit(common, &(serde_json::to_string_pretty(v)? + "\n")),
        Some(f) => bail!("{f:?} output is not available for this command; use --format json"),
    }
}

fn solve_exit(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        Status::IterLimit | Status::TimeLimit => 2,
        Status::Diverging => 3,
    }
}

fn status_str(status: Status) -> Value {
    serde_json::to_value(status).unwrap_or(Value::Null)
}

fn column_names(r: &ReformulatedLp<f64>) -> Vec<String> {
    r.base.col_names.iter().cloned().chain(r.base.row_names.iter().map(|n| format!("w:{n}"))).collect()
}

fn idv_report(r: &ReformulatedLp<f64>, cfg: &PipelineConfig) -> Result<Value> {
    let mut sc = StepConfig::for_lp(&r.lp, cfg.safety)?;
    sc.max_iter = IDV_ITERATIONS;
    let est = estimate_idv(&r.lp, &PdhgState::zeros(&r.lp), &sc, IDV_WINDOW)?;
    Ok(json!({
        "norm": est.norm(&r.lp, sc.eta),
        "disagreement": est.disagreement,
        "degraded": est.degraded,
        "iterations": est.iterations,
        "vx": est.vx,
        "vy": est.vy,
    }))
}

fn solve_report(r: &ReformulatedLp<f64>, out: &SolveOutcome<f64>, elapsed: Duration) -> Value {
    json!({
        "status": status_str(out.status),
        "objective": r.original_objective(&out.state.x),
        "iterations": out.state.k,
        "restarts": out.restarts,
        "residuals": out.residuals,
        "wall_time_sec": elapsed.as_secs_f64(),
        "x": out.state.x,
        "y": out.state.y,
    })
}

fn cmd_solve(input: &Path, common: &Common, warm: Option<&Path>, trajectory: Option<&Path>, stride: usize) -> Result<u8> {
    let cfg = pipeline_config(common)?;
    let r = reformulate(&load(input)?, DEFAULT_SHIFT)?;
    let z0 = warm.map(read_warm).transpose()?;
    let start = Instant::now();
    let mut sc = cfg.step_config();
    if trajectory.is_some() {
        if stride == 0 {
            bail!("--stride must be positive");
        }
        sc.record_stride = Some(stride);
    }
    let z0 = match z0 {
        Some(z) => {
            z.check_dims(&r.lp)?;
            PdhgState { x: z.x.iter().enumerate().map(|(j, &v)| r.lp.clamp(j, v)).collect(), ..z }
        }
        None => PdhgState::zeros(&r.lp),
    };
    let out = spiral_lp::pdhg::solve_scaled(&r.lp, &z0, &sc)?;
    let mut report = solve_report(&r, &out, start.elapsed());
    if out.status == Status::Diverging {
        report["idv"] = idv_report(&r, &cfg)?;
    }
    if let Some(p) = trajectory {
        std::fs::write(p, out.trajectory.to_csv()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    match common.format {
        Some(Format::Text) => emit(
            common,
            &format!("status     {}\nobjective  {}\niterations {}\n", report["status"].as_str().unwrap_or("?"), report["objective"], out.state.k),
        )?,
        _ => emit_json(common, &report)?,
    }
    Ok(solve_exit(out.status))
}

fn cmd_crossover(input: &Path, common: &Common, warm: Option<&Path>) -> Result<u8> {
    let cfg = pipeline_config(common)?;
    let r = reformulate(&load(input)?, DEFAULT_SHIFT)?;
    let z = match warm {
        Some(p) => {
            let z = read_warm(p)?;
            z.check_dims(&r.lp)?;
            z
        }
        None => {
            let out = solve_reformulated(&r, None, &cfg)?;
            if out.status != Status::Optimal {
                let status = if out.status == Status::TimeLimit { CrossoverStatus::Timeout } else { CrossoverStatus::Failed };
                let report = json!({
                    "status": status.as_str(),
                    "message": format!("initial solve stopped with status {}", status_str(out.status)),
                    "residuals": out.residuals,
                });
                emit_json(common, &report)?;
                return Ok(5);
            }
            out.state
        }
    };
    let res = run_crossover(&r.lp, &z, &cfg.crossover_config(r.n_original()))?;
    let offset = r.base.objective_offset;
    let mut report = serde_json::to_value(&res)?;
    report["objective_in"] = json!(res.objective_in + offset);
    report["objective_out"] = json!(res.objective_out + offset);
    let names = column_names(&r);
    report["basis_names"] = json!(res.basis.iter().map(|&j| names[j].clone()).collect::<Vec<_>>());
    report["x"] = json!(res.x);
    report["y"] = json!(res.y);
    match common.format {
        Some(Format::Text) => emit(
            common,
            &format!(
                "status       {}\nsupport      {} -> {}\nobjective    {}\nbasis size   {}\n",
                res.status.as_str(),
                res.support_before,
                res.support_after,
                res.objective_out + offset,
                res.basis.len()
            ),
        )?,
        _ => emit_json(common, &report)?,
    }
    Ok(match res.status {
        CrossoverStatus::Vertex => 0,
        CrossoverStatus::PrimalOnly => 4,
        CrossoverStatus::Timeout | CrossoverStatus::Failed => 5,
    })
}

fn cmd_analyze(input: &Path, common: &Common, warm: Option<&Path>, eta: Option<f64>, trajectory: Option<&Path>) -> Result<u8> {
    let cfg = pipeline_config(common)?;
    let general = load(input)?;
    // equality-form problems are analyzed as given, anything else after reformulation
    let lp = match general.as_standard() {
        Some(lp) => lp,
        None => reformulate(&general, DEFAULT_SHIFT)?.lp,
    };
    let eta = match eta {
        Some(e) if e > 0.0 && e.is_finite() => e,
        Some(e) => bail!("--eta must be positive, got {e}"),
        None => cfg.safety / spectral_norm_estimate(&lp.a, 1e-4)?,
    };
    let z0 = match warm {
        Some(p) => read_warm(p)?,
        None => PdhgState::zeros(&lp),
    };
    let mut sc = StepConfig::with_eta(eta);
    sc.tol = cfg.tol;
    sc.max_iter = cfg.max_iter.min(ANALYZE_CAP);
    sc.restart = Restart::Off;
    sc.record_stride = Some(1);
    sc.time_limit = Some(cfg.time_limit);
    let out = solve(&lp, &z0, &sc)?;
    let phases = segment_phases(&out.trajectory, &lp, eta, &cfg.ols)?;
    let report = json!({
        "status": status_str(out.status),
        "iterations": out.state.k,
        "eta": eta,
        "phases": phases_json(&lp, &phases),
    });
    if let Some(p) = trajectory {
        std::fs::write(p, out.trajectory.to_csv()).with_context(|| format!("cannot write {}", p.display()))?;
    }
    emit_json(common, &report)?;
    Ok(solve_exit(out.status))
}

fn cmd_bench(dir: &Path, common: &Common, workers: usize) -> Result<u8> {
    let cfg = pipeline_config(common)?;
    if !dir.is_dir() {
        bail!("{} is not a directory", dir.display());
    }
    let rows = bench_dir(dir, &cfg, workers)?;
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Text => rows_to_text(&rows),
        Format::Csv => rows_to_csv(&rows),
        Format::Json => serde_json::to_string_pretty(&json!({ "rows": rows, "summary": summary(&rows) }))? + "\n",
    };
    emit(common, &text)?;
    Ok(0)
}
