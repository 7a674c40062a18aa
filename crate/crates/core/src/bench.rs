//! End-to-end pipeline over MPS instances: reformulate, solve with PDHG, run
//! crossover, and report support counts in a table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::crossover::{run_crossover, support, CrossoverConfig, CrossoverResult, CrossoverStatus};
use crate::error::{Error, Result};
use crate::linalg::LsOptions;
use crate::lp::{parse_mps, reformulate, GeneralLp, ReformulatedLp, DEFAULT_SHIFT};
use crate::pdhg::{solve_scaled, PdhgState, Restart, SolveOutcome, Status, StepConfig, DEFAULT_SAFETY};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tol: f64,
    pub seed: u64,
    /// Crossover budget; the PDHG solve gets the same budget separately.
    pub time_limit: Duration,
    pub max_iter: usize,
    pub safety: f64,
    pub ols: LsOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { tol: 1e-8, seed: 0, time_limit: Duration::from_secs(300), max_iter: 10_000_000, safety: DEFAULT_SAFETY, ols: LsOptions::default() }
    }
}

impl PipelineConfig {
    pub fn step_config(&self) -> StepConfig<f64> {
        let mut sc = StepConfig::with_eta(1.0);
        sc.safety = self.safety;
        sc.tol = self.tol;
        sc.max_iter = self.max_iter;
        sc.restart = Restart::Adaptive;
        sc.adaptive_weight = true;
        sc.time_limit = Some(self.time_limit);
        sc
    }

    pub fn crossover_config(&self, counted_columns: usize) -> CrossoverConfig {
        CrossoverConfig {
            seed: self.seed,
            time_limit: self.time_limit,
            ols: self.ols,
            counted_columns: Some(counted_columns),
            ..CrossoverConfig::default()
        }
    }
}

/// Solves the reformulated problem from `z0` (or from zero) with restarted,
/// rescaled PDHG.
pub fn solve_reformulated(r: &ReformulatedLp<f64>, z0: Option<&PdhgState<f64>>, cfg: &PipelineConfig) -> Result<SolveOutcome<f64>> {
    let z0 = match z0 {
        Some(z) => {
            z.check_dims(&r.lp)?;
            PdhgState { x: z.x.iter().enumerate().map(|(j, &v)| r.lp.clamp(j, v)).collect(), y: z.y.clone(), k: 0 }
        }
        None => PdhgState::zeros(&r.lp),
    };
    solve_scaled(&r.lp, &z0, &cfg.step_config())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub prob: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub supp_in: Option<usize>,
    pub supp_out: Option<usize>,
    /// Crossover status, or the reason no crossover ran.
    pub status: String,
    pub time_sec: f64,
}

impl BenchRow {
    pub fn is_vertex(&self) -> bool {
        self.status == CrossoverStatus::Vertex.as_str()
    }
}

/// Runs the pipeline on one parsed instance.
pub fn bench_instance(lp: &GeneralLp<f64>, cfg: &PipelineConfig) -> (BenchRow, Option<CrossoverResult<f64>>) {
    let start = Instant::now();
    let mut row = BenchRow { prob: lp.name.clone(), n_rows: lp.n_rows(), n_cols: lp.n_cols(), supp_in: None, supp_out: None, status: String::new(), time_sec: 0.0 };
    let outcome = (|| -> Result<(usize, Option<CrossoverResult<f64>>, String)> {
        let r = reformulate(lp, DEFAULT_SHIFT)?;
        let sol = solve_reformulated(&r, None, cfg)?;
        let supp = support(&r.lp, &sol.state.x, r.n_original(), CrossoverConfig::default().eps);
        if sol.status != Status::Optimal {
            let s = serde_json::to_value(sol.status).map_err(|e| Error::Invalid(e.to_string()))?;
            return Ok((supp, None, format!("solve_{}", s.as_str().unwrap_or("failed"))));
        }
        let res = run_crossover(&r.lp, &sol.state, &cfg.crossover_config(r.n_original()))?;
        let status = res.status.as_str().to_string();
        Ok((supp, Some(res), status))
    })();
    let result = match outcome {
        Ok((supp, res, status)) => {
            row.supp_in = Some(supp);
            row.supp_out = res.as_ref().map(|r| r.support_after);
            row.status = status;
            res
        }
        Err(e) => {
            row.status = format!("error: {e}");
            None
        }
    };
    row.time_sec = start.elapsed().as_secs_f64();
    (row, result)
}

/// `.mps` files in `dir`, sorted by name.
pub fn instance_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::Invalid(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("mps"))).collect();
    paths.sort();
    Ok(paths)
}

fn bench_path(path: &Path, cfg: &PipelineConfig) -> BenchRow {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let parsed = std::fs::read(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display()))).and_then(|b| parse_mps::<f64>(&b));
    match parsed {
        Ok(mut lp) => {
            lp.name.clone_from(&name);
            bench_instance(&lp, cfg).0
        }
        Err(e) => BenchRow { prob: name, n_rows: 0, n_cols: 0, supp_in: None, supp_out: None, status: format!("error: {e}"), time_sec: 0.0 },
    }
}

/// Benchmarks every `.mps` file in `dir` with `workers` threads. Rows come
/// back in file-name order regardless of the worker count.
pub fn bench_dir(dir: &Path, cfg: &PipelineConfig, workers: usize) -> Result<Vec<BenchRow>> {
    let paths = instance_paths(dir)?;
    let workers = workers.max(1).min(paths.len().max(1));
    let mut rows: Vec<Option<BenchRow>> = vec![None; paths.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let paths = &paths;
                s.spawn(move || paths.iter().enumerate().skip(w).step_by(workers).map(|(i, p)| (i, bench_path(p, cfg))).collect::<Vec<_>>())
            })
            .collect();
        for h in handles {
            for (i, row) in h.join().expect("bench worker panicked") {
                rows[i] = Some(row);
            }
        }
    });
    Ok(rows.into_iter().map(|r| r.expect("every path benchmarked")).collect())
}

pub const CSV_HEADER: &str = "prob,n_rows,n_cols,supp_in,supp_out,status,time_sec";

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_else(|| "-".into())
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        let status = if r.status.contains(',') { format!("\"{}\"", r.status.replace('"', "\"\"")) } else { r.status.clone() };
        let _ = writeln!(out, "{},{},{},{},{},{},{:.3}", r.prob, r.n_rows, r.n_cols, opt(r.supp_in), opt(r.supp_out), status, r.time_sec);
    }
    out
}

/// Aligned table followed by the status counts.
pub fn rows_to_text(rows: &[BenchRow]) -> String {
    let header = ["prob", "nRows", "nCols", "supp_in", "supp_out", "status", "time (sec)"];
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| [r.prob.clone(), r.n_rows.to_string(), r.n_cols.to_string(), opt(r.supp_in), opt(r.supp_out), r.status.clone(), format!("{:.3}", r.time_sec)])
        .collect();
    let widths: Vec<usize> = (0..7).map(|k| cells.iter().map(|c| c[k].chars().count()).chain([header[k].len()]).max().unwrap_or(0)).collect();
    let line = |vals: &[&str]| vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string();
    let mut out = line(&header) + "\n";
    for c in &cells {
        out += &(line(&c.iter().map(String::as_str).collect::<Vec<_>>()) + "\n");
    }
    let s = summary(rows);
    let _ = writeln!(out, "\nvertex {}  primal_only {}  timeout {}  failed {}  other {}", s.vertex, s.primal_only, s.timeout, s.failed, s.other);
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BenchSummary {
    pub vertex: usize,
    pub primal_only: usize,
    pub timeout: usize,
    pub failed: usize,
    /// Instances where no crossover ran (solve did not converge or input error).
    pub other: usize,
}

pub fn summary(rows: &[BenchRow]) -> BenchSummary {
    let mut s = BenchSummary::default();
    for r in rows {
        match r.status.as_str() {
            "vertex" => s.vertex += 1,
            "primal_only" => s.primal_only += 1,
            "timeout" => s.timeout += 1,
            "failed" => s.failed += 1,
            _ => s.other += 1,
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(status: &str) -> BenchRow {
        BenchRow { prob: "p".into(), n_rows: 1, n_cols: 2, supp_in: Some(2), supp_out: Some(1), status: status.into(), time_sec: 0.5 }
    }

    #[test]
    fn csv_columns_match_header() {
        let csv = rows_to_csv(&[row("vertex"), row("error: a, b")]);
        let n = CSV_HEADER.split(',').count();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next().unwrap().split(',').count(), n);
    }

    #[test]
    fn text_has_summary() {
        let t = rows_to_text(&[row("vertex"), row("timeout")]);
        assert!(t.contains("vertex 1  primal_only 0  timeout 1"));
    }

    #[test]
    fn empty_dir() {
        let dir = std::env::temp_dir().join(format!("spiral-lp-empty-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        assert!(bench_dir(&dir, &PipelineConfig::default(), 2).unwrap().is_empty());
        std::fs::remove_dir(&dir).unwrap();
    }
}
