use std::io::Write;
use std::path::Path;

use inlm_core::nn::{self, CsvSpec, NnProblem, SatLin, SynthSpec, TestScaling};
use inlm_core::Vector;
use serde::Serialize;

use crate::args::{NnArgs, ScalingArg};
use crate::config::{CsvSource, ExperimentConfig, ProblemKind, TestScalingName};
use crate::error::{CliError, CliResult};
use crate::experiment::{
    base_config, prepare_out_dir, print_run, run_parallel, solve, solver_config, RunSummary, Solved,
};
use crate::output::{alpha_tag, fmt_num, write_json, write_trace_csv, write_with, Num};

#[derive(Serialize)]
struct NnSummary<'a> {
    command: &'static str,
    config_hash: String,
    config: &'a ExperimentConfig,
    delta: Num,
    scale_factor: Num,
    runs: Vec<RunSummary>,
}

pub fn resolve(args: &NnArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = base_config(ProblemKind::Nn, &args.common)?;
    let nn = &mut cfg.nn;
    if let Some(v) = args.train {
        nn.train = v;
    }
    if let Some(v) = args.test {
        nn.test = v;
    }
    if let Some(v) = args.input_dim {
        nn.input_dim = v;
    }
    if let Some(v) = args.epochs {
        cfg.max_iters = v;
    }
    if args.synthetic {
        nn.csv = None;
    }
    if let Some(path) = &args.csv {
        let previous = nn.csv.take();
        let target_column = args
            .target_col
            .or(previous.as_ref().map(|c| c.target_column))
            .ok_or_else(|| CliError::Config("--csv needs --target-col".into()))?;
        nn.csv = Some(CsvSource {
            path: path.clone(),
            target_column,
            excluded_columns: args
                .exclude_cols
                .clone()
                .or(previous.as_ref().map(|c| c.excluded_columns.clone()))
                .unwrap_or_default(),
            has_header: args.has_header.or(previous.as_ref().and_then(|c| c.has_header)),
            test_scaling: previous.map_or(TestScalingName::Train, |c| c.test_scaling),
        });
    }
    if let (Some(s), Some(csv)) = (args.test_scaling, nn.csv.as_mut()) {
        csv.test_scaling = match s {
            ScalingArg::Train => TestScalingName::Train,
            ScalingArg::Own => TestScalingName::Own,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Dataset {
    problem: NnProblem,
    truth: Option<Vector>,
    delta: f64,
}

fn load(cfg: &ExperimentConfig) -> CliResult<Dataset> {
    let act = SatLin::new(cfg.nn.act_a, cfg.nn.act_c)?;
    match &cfg.nn.csv {
        None => {
            let data = nn::synth_dataset(&SynthSpec {
                n_train: cfg.nn.train,
                n_test: cfg.nn.test,
                input_dim: cfg.nn.input_dim,
                noise_pct: cfg.noise_pct,
                seed: cfg.seed,
                act,
            })?;
            Ok(Dataset {
                truth: Some(data.truth.to_vector()?),
                delta: data.train_noise,
                problem: data.problem,
            })
        }
        Some(src) => {
            let spec = CsvSpec {
                target_column: src.target_column,
                excluded_columns: src.excluded_columns.clone(),
                n_train: cfg.nn.train,
                n_test: cfg.nn.test,
                has_header: src.has_header,
                scaling: match src.test_scaling {
                    TestScalingName::Train => TestScaling::TrainFactor,
                    TestScalingName::Own => TestScaling::OwnFactor,
                },
            };
            // measured data: the noise level is unknown, δ = 0 runs every epoch
            Ok(Dataset {
                problem: nn::load_csv_dataset(&src.path, &spec, act)?,
                truth: None,
                delta: 0.0,
            })
        }
    }
}

pub fn run(args: &NnArgs) -> CliResult<()> {
    let cfg = resolve(args)?;
    let out = prepare_out_dir(&cfg, args.common.out.as_deref())?;
    let data = load(&cfg)?;
    let prob = &data.problem;
    let y = prob.train_targets();
    let x0 = nn::random_initial_params(prob.input_dim(), cfg.seed.wrapping_add(1));

    let alphas = cfg.alpha_sweep.clone();
    let results = run_parallel(alphas.len(), args.common.jobs as usize, |i| {
        let solved = solve(
            prob,
            &y,
            &x0,
            data.truth.as_ref(),
            solver_config(&cfg, alphas[i], data.delta),
        )?;
        let errors = nn::relative_test_errors(prob, &solved.outcome.final_iterate);
        Ok::<_, inlm_core::Error>((solved, errors))
    });

    let mut runs = Vec::with_capacity(alphas.len());
    let mut curves = Vec::with_capacity(alphas.len());
    for (&alpha, result) in alphas.iter().zip(results) {
        let hash = cfg.single_run(alpha).hash();
        let summary = match result {
            Ok((solved, errors)) => {
                let tag = alpha_tag(alpha);
                write_trace_csv(&out.join(format!("nn_{tag}.trace.csv")), &solved.outcome.trace)?;
                let mut s = RunSummary::ok(alpha, hash, &solved, args.common.record_timing);
                match errors {
                    Ok(errs) => {
                        write_test_errors(&out.join(format!("nn_{tag}.test_errors.csv")), &errs)?;
                        s.performance = Some(Num(1.0 - errs.iter().sum::<f64>() / errs.len() as f64));
                    }
                    Err(e) => s.warnings.push(format!("performance undefined: {e}")),
                }
                eprintln!("nn alpha={alpha}: {:.3} s", solved.seconds);
                curves.push(Some(relative_residuals(&solved)));
                s
            }
            Err(e) => {
                curves.push(None);
                RunSummary::failed(alpha, hash, e.to_string())
            }
        };
        print_run("nn", &summary);
        runs.push(summary);
    }
    write_relres(&out.join("nn_relres.csv"), &alphas, &curves)?;

    let failed = runs.iter().filter(|r| !r.is_ok()).count();
    let total = runs.len();
    write_json(
        &out.join("summary.json"),
        &NnSummary {
            command: "nn",
            config_hash: cfg.hash(),
            config: &cfg,
            delta: Num(data.delta),
            scale_factor: Num(prob.scale_factor()),
            runs,
        },
    )?;
    if failed > 0 {
        return Err(CliError::RunsFailed { failed, total });
    }
    Ok(())
}

/// Residual norms divided by the residual at the starting point.
pub fn relative_residuals(solved: &Solved) -> Vec<f64> {
    let records = &solved.outcome.trace.records;
    let r0 = records[0].residual_norm;
    records.iter().map(|r| r.residual_norm / r0).collect()
}

fn write_test_errors(path: &Path, errs: &[f64]) -> CliResult<()> {
    write_with(path, |out| {
        writeln!(out, "sample,relative_error")?;
        for (i, e) in errs.iter().enumerate() {
            writeln!(out, "{i},{}", fmt_num(*e))?;
        }
        Ok(())
    })
}

/// One column per sweep entry; cells past the end of a run, or of a failed
/// run, stay empty.
fn write_relres(path: &Path, alphas: &[f64], curves: &[Option<Vec<f64>>]) -> CliResult<()> {
    let rows = curves.iter().flatten().map(Vec::len).max().unwrap_or(0);
    write_with(path, |out| {
        write!(out, "epoch")?;
        for a in alphas {
            write!(out, ",{}", alpha_tag(*a))?;
        }
        writeln!(out)?;
        for k in 0..rows {
            write!(out, "{k}")?;
            for c in curves {
                let cell = c
                    .as_ref()
                    .and_then(|c| c.get(k))
                    .map(|v| fmt_num(*v))
                    .unwrap_or_default();
                write!(out, ",{cell}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    })
}
