use std::path::Path;

use inlm_core::pde;
use inlm_core::Vector;
use serde::Serialize;

use crate::args::PdeArgs;
use crate::config::{ExperimentConfig, ProblemKind};
use crate::error::{CliError, CliResult};
use crate::experiment::{
    base_config, prepare_out_dir, print_run, run_parallel, solve, solver_config, RunSummary, Solved,
};
use crate::output::{alpha_tag, write_grid, write_json, write_trace_csv, Num};

#[derive(Serialize)]
struct PdeSummary<'a> {
    command: &'static str,
    config_hash: String,
    config: &'a ExperimentConfig,
    delta: Num,
    naive_relative_error: Option<Num>,
    runs: Vec<RunSummary>,
}

pub fn resolve(args: &PdeArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = base_config(ProblemKind::Pde, &args.common)?;
    if let Some(n) = args.n {
        cfg.pde.n = n;
    }
    if let Some(k) = args.iters {
        cfg.max_iters = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &PdeArgs) -> CliResult<()> {
    let cfg = resolve(args)?;
    let out = prepare_out_dir(&cfg, args.common.out.as_deref())?;
    let n = cfg.pde.n;

    let (prob, phantom) = pde::make_phantom(n)?;
    let (y, delta) = pde::add_relative_noise(&phantom.u_true, cfg.noise_pct, cfg.seed)?;
    write_grid(&out.join("pde_phantom.c_true.csv"), n, &phantom.c_true)?;
    write_grid(&out.join("pde_data.csv"), n, &y)?;

    let naive_relative_error = match pde::naive_reconstruction(n, &y, &phantom.g_grid) {
        Ok(c) => {
            write_grid(&out.join("pde_naive.csv"), n, &c)?;
            Some(Num(c.distance(&phantom.c_true)? / phantom.c_true.norm()))
        }
        Err(e) => {
            eprintln!("warning: naive reconstruction failed: {e}");
            None
        }
    };

    let x0 = Vector::zeros(n * n);
    let alphas = cfg.alpha_sweep.clone();
    let results = run_parallel(alphas.len(), args.common.jobs as usize, |i| {
        solve(
            &prob,
            &y,
            &x0,
            Some(&phantom.c_true),
            solver_config(&cfg, alphas[i], delta),
        )
    });

    let mut runs = Vec::with_capacity(alphas.len());
    for (&alpha, result) in alphas.iter().zip(results) {
        let hash = cfg.single_run(alpha).hash();
        let summary = match result {
            Ok(solved) => {
                write_run_files(&out, n, alpha, &solved)?;
                eprintln!("pde alpha={alpha}: {:.3} s", solved.seconds);
                RunSummary::ok(alpha, hash, &solved, args.common.record_timing)
            }
            Err(e) => RunSummary::failed(alpha, hash, e.to_string()),
        };
        print_run("pde", &summary);
        runs.push(summary);
    }

    let failed = runs.iter().filter(|r| !r.is_ok()).count();
    let total = runs.len();
    write_json(
        &out.join("summary.json"),
        &PdeSummary {
            command: "pde",
            config_hash: cfg.hash(),
            config: &cfg,
            delta: Num(delta),
            naive_relative_error,
            runs,
        },
    )?;
    if failed > 0 {
        return Err(CliError::RunsFailed { failed, total });
    }
    Ok(())
}

fn write_run_files(out: &Path, n: usize, alpha: f64, solved: &Solved) -> CliResult<()> {
    let tag = alpha_tag(alpha);
    let o = &solved.outcome;
    write_trace_csv(&out.join(format!("pde_{tag}.trace.csv")), &o.trace)?;
    write_grid(&out.join(format!("pde_{tag}.final.csv")), n, &o.final_iterate)?;
    if let Some(best) = &o.best_iterate {
        write_grid(&out.join(format!("pde_{tag}.best.csv")), n, best)?;
    }
    let at_k_star = o
        .discrepancy_iterate
        .as_ref()
        .or(o.trace.k_star.map(|_| &o.final_iterate));
    if let Some(c) = at_k_star {
        write_grid(&out.join(format!("pde_{tag}.kstar.csv")), n, c)?;
    }
    Ok(())
}
