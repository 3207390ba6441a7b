//! Pieces shared by the `pde` and `nn` commands: config resolution, the
//! parallel sweep and per-run summaries.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use inlm_core::inlm::{DiscrepancyPolicy, RunOutcome};
use inlm_core::{AlphaSchedule, CgConfig, ForwardModel, InertialLm, LambdaSchedule, SolverConfig, Vector};
use serde::Serialize;

use crate::args::CommonArgs;
use crate::config::{ExperimentConfig, ProblemKind};
use crate::error::{io_err, CliResult};
use crate::output::Num;

/// Defaults, then the config file, then the shared flags.
pub fn base_config(problem: ProblemKind, args: &CommonArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(problem, path)?,
        None => ExperimentConfig::defaults(problem),
    };
    if let Some(v) = args.noise {
        cfg.noise_pct = v;
    }
    if let Some(a) = args.alpha {
        cfg.alpha_sweep = vec![a];
    }
    if let Some(sweep) = &args.alpha_sweep {
        cfg.alpha_sweep = sweep.clone();
    }
    if let Some(v) = args.tau {
        cfg.tau = v;
    }
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.cg_iters {
        cfg.cg_iters = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if args.stop_at_discrepancy {
        cfg.stop_at_discrepancy = true;
    }
    Ok(cfg)
}

pub fn prepare_out_dir(cfg: &ExperimentConfig, flag: Option<&Path>) -> CliResult<PathBuf> {
    let dir = cfg.resolve_output_dir(flag);
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

/// Solver settings for one sweep entry.
pub fn solver_config(cfg: &ExperimentConfig, alpha: f64, delta: f64) -> SolverConfig {
    SolverConfig {
        alpha: AlphaSchedule::Constant(alpha),
        lambda: LambdaSchedule::constant(cfg.lambda),
        tau: cfg.tau,
        delta,
        cg: CgConfig::truncated(cfg.cg_iters),
        max_outer_iters: cfg.max_iters,
        discrepancy: if cfg.stop_at_discrepancy {
            DiscrepancyPolicy::Stop
        } else {
            DiscrepancyPolicy::Record
        },
        ..SolverConfig::default()
    }
}

pub struct Solved {
    pub outcome: RunOutcome,
    pub warnings: Vec<String>,
    pub seconds: f64,
}

/// Exact-data iteration when `delta == 0`, discrepancy-driven otherwise.
pub fn solve<M: ForwardModel + ?Sized>(
    model: &M,
    y: &Vector,
    x0: &Vector,
    truth: Option<&Vector>,
    cfg: SolverConfig,
) -> inlm_core::Result<Solved> {
    let start = Instant::now();
    let exact = cfg.delta == 0.0;
    let mut solver = InertialLm::new(model, cfg)?;
    if let Some(t) = truth {
        solver = solver.with_truth(t.clone())?;
    }
    let outcome = if exact {
        solver.run_exact(y, x0)?
    } else {
        solver.run_noisy(y, x0)?
    };
    let mut warnings = solver.warnings().to_vec();
    warnings.extend(outcome.trace.warnings.iter().cloned());
    Ok(Solved {
        outcome,
        warnings,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs `f(0), ..., f(count - 1)` on `jobs` worker threads; results keep
/// index order.
pub fn run_parallel<T: Send>(count: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, count.max(1));
    if jobs == 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let mut done: Vec<(usize, T)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= count {
                            break local;
                        }
                        local.push((i, f(i)));
                    }
                })
            })
            .collect();
        workers
            .into_iter()
            .flat_map(|w| w.join().expect("sweep worker panicked"))
            .collect()
    });
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, t)| t).collect()
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub alpha: Num,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config_hash: String,
    pub k_star: Option<usize>,
    pub stop_reason: Option<&'static str>,
    pub iterations: Option<usize>,
    pub final_residual: Option<Num>,
    pub final_distance: Option<Num>,
    pub best_k: Option<usize>,
    pub best_distance: Option<Num>,
    pub residual_at_k_star: Option<Num>,
    pub distance_at_k_star: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub performance: Option<Num>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<Num>,
}

impl RunSummary {
    pub fn ok(alpha: f64, config_hash: String, solved: &Solved, record_timing: bool) -> Self {
        let trace = &solved.outcome.trace;
        let last = trace.final_record();
        let at_k_star = trace.k_star.and_then(|k| trace.records.get(k));
        Self {
            alpha: Num(alpha),
            status: "ok",
            error: None,
            config_hash,
            k_star: trace.k_star,
            stop_reason: Some(trace.stop_reason.as_str()),
            iterations: Some(last.k),
            final_residual: Some(Num(last.residual_norm)),
            final_distance: last.distance_to_truth.map(Num),
            best_k: trace.best.map(|b| b.k),
            best_distance: trace.best.map(|b| Num(b.distance)),
            residual_at_k_star: at_k_star.map(|r| Num(r.residual_norm)),
            distance_at_k_star: at_k_star.and_then(|r| r.distance_to_truth).map(Num),
            performance: None,
            warnings: solved.warnings.clone(),
            wall_time_s: record_timing.then_some(Num(solved.seconds)),
        }
    }

    pub fn failed(alpha: f64, config_hash: String, error: String) -> Self {
        Self {
            alpha: Num(alpha),
            status: "failed",
            error: Some(error),
            config_hash,
            k_star: None,
            stop_reason: None,
            iterations: None,
            final_residual: None,
            final_distance: None,
            best_k: None,
            best_distance: None,
            residual_at_k_star: None,
            distance_at_k_star: None,
            performance: None,
            warnings: Vec::new(),
            wall_time_s: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// One human-readable line per run on stdout.
pub fn print_run(command: &str, s: &RunSummary) {
    let opt = |v: Option<Num>| v.map_or("-".to_string(), |n| format!("{:.6e}", n.0));
    match &s.error {
        Some(e) => println!("{command} alpha={} FAILED: {e}", s.alpha.0),
        None => println!(
            "{command} alpha={} k*={} stop={} iters={} residual={} distance={}{}",
            s.alpha.0,
            s.k_star.map_or("-".to_string(), |k| k.to_string()),
            s.stop_reason.unwrap_or("-"),
            s.iterations.unwrap_or(0),
            opt(s.final_residual),
            opt(s.final_distance),
            s.performance
                .map_or(String::new(), |p| format!(" performance={:.6}", p.0)),
        ),
    }
}
