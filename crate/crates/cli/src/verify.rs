//! Verification suites: operator consistency, the inner solver, the iteration
//! identities, and the stopping-index bound.

use inlm_core::inlm::{
    kstar_bound, verify_iteration_identities, DiscrepancyPolicy, IdentityKind, IdentityParams, ScheduleTheta,
    TheoryAlpha,
};
use inlm_core::linops::{check_adjoint, check_jacobian_fd, AffineModel, DenseOperator};
use inlm_core::nn::{self, SatLin, SynthSpec};
use inlm_core::{
    cg_normal_solve, pde, rng, run_exact, run_noisy, AlphaSchedule, CgConfig, ForwardModel, LambdaSchedule,
    LinearOperator, SolverConfig, Vector,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::args::{ProblemArg, Suite, VerifyArgs};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub problem: ProblemArg,
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule, e.g. `<= 1e-10`.
    pub limit: String,
    pub passed: bool,
}

fn at_most(suite: Suite, problem: ProblemArg, name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check {
        suite,
        problem,
        name: name.into(),
        value,
        limit: format!("<= {limit:e}"),
        passed: value <= limit,
    }
}

fn at_least(suite: Suite, problem: ProblemArg, name: impl Into<String>, value: f64, limit: f64) -> Check {
    Check {
        suite,
        problem,
        name: name.into(),
        value,
        limit: format!(">= {limit:e}"),
        passed: value >= limit,
    }
}

type SuiteFn = fn() -> CliResult<Vec<Check>>;

const REGISTRY: &[(Suite, ProblemArg, SuiteFn)] = &[
    (Suite::Adjoint, ProblemArg::Scalar, adjoint_scalar),
    (Suite::Adjoint, ProblemArg::Pde, adjoint_pde),
    (Suite::Adjoint, ProblemArg::Nn, adjoint_nn),
    (Suite::Fd, ProblemArg::Scalar, fd_scalar),
    (Suite::Fd, ProblemArg::Pde, fd_pde),
    (Suite::Fd, ProblemArg::Nn, fd_nn),
    (Suite::Cg, ProblemArg::Scalar, cg_oracle),
    (Suite::Lemma, ProblemArg::Scalar, lemma_scalar),
    (Suite::Lemma, ProblemArg::Pde, lemma_pde),
    (Suite::Monotone, ProblemArg::Scalar, monotone_scalar),
    (Suite::Monotone, ProblemArg::Nn, monotone_nn),
    (Suite::Wtcc, ProblemArg::Nn, wtcc_nn),
    (Suite::Kstar, ProblemArg::Scalar, kstar_scalar),
];

/// Runs the selected suites; an empty `suites` selects all.
pub fn run_checks(suites: &[Suite], problem: Option<ProblemArg>) -> CliResult<Vec<Check>> {
    let selected: Vec<_> = REGISTRY
        .iter()
        .filter(|(s, p, _)| (suites.is_empty() || suites.contains(s)) && problem.is_none_or(|q| q == *p))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Config("no verification suite matches the selection".into()));
    }
    let mut checks = Vec::new();
    for (_, _, f) in selected {
        checks.extend(f()?);
    }
    Ok(checks)
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let checks = run_checks(&args.suite, args.problem)?;
    print_table(&checks);
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Adjoint => "adjoint",
        Suite::Fd => "fd",
        Suite::Cg => "cg",
        Suite::Lemma => "lemma",
        Suite::Monotone => "monotone",
        Suite::Wtcc => "wtcc",
        Suite::Kstar => "kstar",
    }
}

fn problem_name(p: ProblemArg) -> &'static str {
    match p {
        ProblemArg::Scalar => "scalar",
        ProblemArg::Pde => "pde",
        ProblemArg::Nn => "nn",
    }
}

fn print_table(checks: &[Check]) {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    println!(
        "{:<9} {:<7} {:<width$} {:>14}  {:<12} result",
        "suite", "problem", "check", "value", "limit"
    );
    for c in checks {
        println!(
            "{:<9} {:<7} {:<width$} {:>14.6e}  {:<12} {}",
            suite_name(c.suite),
            problem_name(c.problem),
            c.name,
            c.value,
            c.limit,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} checks passed", checks.len());
}

fn random_affine(seed: u64, rows: usize, cols: usize) -> CliResult<AffineModel> {
    let mut stream = rng::seeded(seed);
    let data = rng::normal_vector(&mut stream, rows * cols).into_vec();
    let offset = rng::normal_vector(&mut stream, rows);
    Ok(AffineModel::new(DenseOperator::new(rows, cols, data)?, offset)?)
}

fn adjoint_scalar() -> CliResult<Vec<Check>> {
    let model = random_affine(11, 7, 5)?;
    let x = rng::normal_vector(&mut rng::seeded(12), 5);
    let worst = check_adjoint(&model, &x, 100, 13)?;
    Ok(vec![at_most(
        Suite::Adjoint,
        ProblemArg::Scalar,
        "dense affine 7x5",
        worst,
        1e-10,
    )])
}

fn adjoint_pde() -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [4, 8, 16] {
        let (prob, ph) = pde::make_phantom(n)?;
        let worst = check_adjoint(&prob, &ph.c_true, 100, n as u64)?;
        checks.push(at_most(
            Suite::Adjoint,
            ProblemArg::Pde,
            format!("n = {n}"),
            worst,
            1e-10,
        ));
    }
    Ok(checks)
}

fn small_nn(seed: u64, noise_pct: f64) -> CliResult<nn::SynthDataset> {
    Ok(nn::synth_dataset(&SynthSpec {
        n_train: 500,
        n_test: 50,
        noise_pct,
        seed,
        ..SynthSpec::default()
    })?)
}

fn adjoint_nn() -> CliResult<Vec<Check>> {
    let data = small_nn(21, 0.01)?;
    let mut checks = Vec::new();
    let linear = data.truth.to_vector()?;
    let saturated = rng::uniform_vector(&mut rng::seeded(22), 15, -15.0, 15.0);
    for (label, x) in [("linear region", linear), ("saturated", saturated)] {
        let worst = check_adjoint(&data.problem, &x, 100, 23)?;
        checks.push(at_most(Suite::Adjoint, ProblemArg::Nn, label, worst, 1e-10));
    }
    Ok(checks)
}

fn fd_scalar() -> CliResult<Vec<Check>> {
    let model = random_affine(31, 7, 5)?;
    let mut stream = rng::seeded(32);
    let x = rng::normal_vector(&mut stream, 5);
    let h = rng::normal_vector(&mut stream, 5);
    let errs = check_jacobian_fd(&model, &x, &h, &[1e-1, 1e-6])?;
    Ok(vec![at_most(
        Suite::Fd,
        ProblemArg::Scalar,
        "dense affine, t = 1e-1, 1e-6",
        max(&errs),
        1e-8,
    )])
}

fn fd_pde() -> CliResult<Vec<Check>> {
    let (prob, ph) = pde::make_phantom(8)?;
    let h = rng::normal_vector(&mut rng::seeded(33), 64);
    let errs = check_jacobian_fd(&prob, &ph.c_true, &h, &[1e-6])?;
    Ok(vec![at_most(
        Suite::Fd,
        ProblemArg::Pde,
        "n = 8, t = 1e-6",
        errs[0],
        1e-5,
    )])
}

fn fd_nn() -> CliResult<Vec<Check>> {
    let data = small_nn(34, 0.01)?;
    let x = data.truth.to_vector()?;
    let h = rng::normal_vector(&mut rng::seeded(35), 15);
    let errs = check_jacobian_fd(&data.problem, &x, &h, &[1e-1, 1e-3, 1e-6])?;
    Ok(vec![at_most(
        Suite::Fd,
        ProblemArg::Nn,
        "linear region, t = 1e-1..1e-6",
        max(&errs),
        1e-9,
    )])
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn cg_oracle() -> CliResult<Vec<Check>> {
    let mut stream = rng::seeded(41);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let m = stream.random_range(1..=16);
        let n = stream.random_range(1..=16);
        let lambda = stream.random_range(0.1..10.0);
        let data = rng::normal_vector(&mut stream, m * n).into_vec();
        let r = rng::normal_vector(&mut stream, m);
        let model = AffineModel::linear(DenseOperator::new(m, n, data.clone())?);
        let (s, _) = cg_normal_solve(
            &model,
            &Vector::zeros(n),
            &r,
            lambda,
            &CgConfig::to_tolerance(1e-12, 1000),
        )?;

        let a = DMatrix::from_row_slice(m, n, &data);
        let lhs = a.transpose() * &a + DMatrix::identity(n, n) * lambda;
        let rhs = a.transpose() * DVector::from_column_slice(r.as_slice());
        let exact = lhs
            .cholesky()
            .ok_or_else(|| inlm_core::Error::InvalidParameter("oracle matrix is not positive definite".into()))?
            .solve(&rhs);
        let got = DVector::from_column_slice(s.as_slice());
        worst = worst.max((got - &exact).norm() / exact.norm().max(f64::MIN_POSITIVE));
    }
    Ok(vec![at_most(
        Suite::Cg,
        ProblemArg::Scalar,
        "20 dense instances vs Cholesky",
        worst,
        1e-8,
    )])
}

fn scalar_point(x: f64) -> Vector {
    Vector::new(vec![x]).expect("finite")
}

fn lemma_scalar() -> CliResult<Vec<Check>> {
    let model = AffineModel::scalar(2.0)?;
    let truth = scalar_point(1.05);
    let y = model.apply(&truth)?;
    // q below λ/(λ + C²) = 0.2
    let params = IdentityParams {
        q: 0.19,
        ..IdentityParams::default()
    };
    let mut checks = Vec::new();
    for alpha in [0.0, 0.3, 0.9] {
        let cfg = SolverConfig {
            alpha: AlphaSchedule::Constant(alpha),
            lambda: LambdaSchedule::constant(1.0),
            cg: CgConfig::to_tolerance(1e-14, 50),
            max_outer_iters: 50,
            exact_zero_tol: Some(0.0),
            keep_iterates: true,
            ..SolverConfig::default()
        };
        let out = run_exact(&model, &y, &scalar_point(0.0), &cfg)?;
        let report = verify_iteration_identities(&model, &y, &out, Some(&truth), params)?;
        for kind in [
            IdentityKind::Extrapolation,
            IdentityKind::ResidualMap,
            IdentityKind::StepFromResidual,
        ] {
            let worst = report.worst(kind).unwrap_or(0.0);
            checks.push(at_most(
                Suite::Lemma,
                ProblemArg::Scalar,
                format!("{} alpha={alpha}", kind.name()),
                worst,
                params.tol,
            ));
        }
        for kind in [
            IdentityKind::LinearizedResidualBounds,
            IdentityKind::ResidualGrowth,
            IdentityKind::Gain,
        ] {
            let worst = report.worst(kind).unwrap_or(0.0);
            checks.push(at_least(
                Suite::Lemma,
                ProblemArg::Scalar,
                format!("{} alpha={alpha}", kind.name()),
                worst,
                -params.slack,
            ));
        }
    }
    Ok(checks)
}

/// Truncated inner solves: only the extrapolation identity is expected to
/// hold, and the verifier must flag the mode mismatch.
fn lemma_pde() -> CliResult<Vec<Check>> {
    let n = 16;
    let (prob, ph) = pde::make_phantom(n)?;
    let cfg = SolverConfig {
        alpha: AlphaSchedule::Constant(0.6),
        lambda: LambdaSchedule::constant(0.01),
        cg: CgConfig::truncated(2),
        max_outer_iters: 10,
        exact_zero_tol: Some(0.0),
        keep_iterates: true,
        ..SolverConfig::default()
    };
    let out = run_exact(&prob, &ph.u_true, &Vector::zeros(n * n), &cfg)?;
    let report = verify_iteration_identities(&prob, &ph.u_true, &out, None, IdentityParams::default())?;
    let worst = report.worst(IdentityKind::Extrapolation).unwrap_or(0.0);
    Ok(vec![
        at_most(
            Suite::Lemma,
            ProblemArg::Pde,
            "extrapolation, truncated CG",
            worst,
            1e-10,
        ),
        Check {
            suite: Suite::Lemma,
            problem: ProblemArg::Pde,
            name: "truncated CG flagged as mode mismatch".into(),
            value: f64::from(u8::from(report.mode_mismatch)),
            limit: "== 1".into(),
            passed: report.mode_mismatch,
        },
    ])
}

fn theory_config(lambda: f64, delta: f64, tau: f64, rho: f64) -> SolverConfig {
    SolverConfig {
        alpha: AlphaSchedule::Theory(TheoryAlpha {
            alpha_cap: 0.9,
            theta: ScheduleTheta::InverseSquare,
            rho,
            monotone: false,
        }),
        lambda: LambdaSchedule::constant(lambda).with_max(lambda),
        tau,
        delta,
        cg: CgConfig::to_tolerance(1e-14, 50),
        max_outer_iters: 100_000,
        eta: Some(0.0),
        q: Some(0.5),
        op_bound: Some(2.0),
        ..SolverConfig::default()
    }
}

fn monotone_scalar() -> CliResult<Vec<Check>> {
    let model = AffineModel::scalar(2.0)?;
    let truth = scalar_point(1.0);
    let delta = 0.05;
    let y = scalar_point(2.0 + delta);
    let cfg = SolverConfig {
        keep_iterates: true,
        ..theory_config(5.0, delta, 2.5, 2.0)
    };
    let out = run_noisy(&model, &y, &scalar_point(0.0), &cfg)?;
    let params = IdentityParams {
        q: 0.5,
        delta,
        ..IdentityParams::default()
    };
    let report = verify_iteration_identities(&model, &y, &out, Some(&truth), params)?;
    Ok([IdentityKind::Monotone, IdentityKind::Gain]
        .into_iter()
        .map(|kind| {
            let worst = report.worst(kind).unwrap_or(0.0);
            at_least(
                Suite::Monotone,
                ProblemArg::Scalar,
                format!("{} theory weights", kind.name()),
                worst,
                -params.slack,
            )
        })
        .collect())
}

/// Affine in the open linear region, so η = 0 and exact inner solves make the
/// noisy monotonicity hold.
fn monotone_nn() -> CliResult<Vec<Check>> {
    let data = small_nn(51, 0.01)?;
    let prob = &data.problem;
    let truth = data.truth.to_vector()?;
    let y = prob.train_targets();
    let lin = prob.linearize(&truth)?;
    let c_sq = operator_norm_sq(&lin)?;
    let lambda = c_sq;
    let q = 0.9 * lambda / (lambda + c_sq);
    let tau = 1.1 / q;
    let cfg = SolverConfig {
        alpha: AlphaSchedule::Constant(0.1),
        lambda: LambdaSchedule::constant(lambda),
        tau,
        delta: data.train_noise,
        cg: CgConfig::to_tolerance(1e-14, 200),
        max_outer_iters: 200,
        discrepancy: DiscrepancyPolicy::Stop,
        keep_iterates: true,
        ..SolverConfig::default()
    };
    let out = run_noisy(prob, &y, &Vector::zeros(15), &cfg)?;
    let history = out.history.as_ref().ok_or(inlm_core::Error::MissingIterates)?;
    let mut linear = true;
    for w in &history.ws {
        linear &= prob.linearize(w)?.slopes().iter().all(|s| *s == 1.0);
    }
    let params = IdentityParams {
        q,
        delta: data.train_noise,
        ..IdentityParams::default()
    };
    let report = verify_iteration_identities(prob, &y, &out, Some(&truth), params)?;
    let worst = report.worst(IdentityKind::Monotone).unwrap_or(0.0);
    Ok(vec![
        Check {
            suite: Suite::Monotone,
            problem: ProblemArg::Nn,
            name: "iterates stay in the linear region".into(),
            value: f64::from(u8::from(linear)),
            limit: "== 1".into(),
            passed: linear,
        },
        at_least(
            Suite::Monotone,
            ProblemArg::Nn,
            "monotone, exact CG",
            worst,
            -params.slack,
        ),
    ])
}

/// `|A|²` from the dense Gram matrix `A*A`.
fn operator_norm_sq<L: LinearOperator>(op: &L) -> CliResult<f64> {
    let n = op.domain_dim();
    let mut gram = DMatrix::zeros(n, n);
    for j in 0..n {
        let e = Vector::from_fn(n, |i| if i == j { 1.0 } else { 0.0 })?;
        let col = op.apply_adjoint(&op.apply(&e)?)?;
        gram.set_column(j, &DVector::from_column_slice(col.as_slice()));
    }
    Ok(gram.symmetric_eigenvalues().max())
}

fn wtcc_nn() -> CliResult<Vec<Check>> {
    let act = SatLin::default();
    let worst = nn::check_scalar_wtcc(&act, 1_000_000, 61)?;
    Ok(vec![at_most(
        Suite::Wtcc,
        ProblemArg::Nn,
        "a = 2/3, 1e6 pairs",
        worst,
        act.wtcc_constant() + 1e-12,
    )])
}

fn kstar_scalar() -> CliResult<Vec<Check>> {
    let model = AffineModel::scalar(2.0)?;
    let (q, eta, tau, rho) = (0.5, 0.0, 2.5, 2.0);
    let theta_sum = ScheduleTheta::InverseSquare
        .total()
        .ok_or_else(|| inlm_core::Error::InvalidParameter("theta schedule is not summable".into()))?;
    let mut stream = rng::seeded(71);
    let mut checks = Vec::new();
    for _ in 0..10 {
        let delta = stream.random_range(0.01..0.2);
        // λ > q C² / (1 - q) = 4
        let lambda = stream.random_range(4.5..10.0);
        let y = scalar_point(2.0 + delta);
        let out = run_noisy(&model, &y, &scalar_point(0.0), &theory_config(lambda, delta, tau, rho))?;
        let bound = kstar_bound(lambda, q, tau, delta, eta, rho, theta_sum)?;
        let observed = out.trace.k_star.map_or(f64::INFINITY, |k| k as f64);
        checks.push(at_most(
            Suite::Kstar,
            ProblemArg::Scalar,
            format!("delta={delta:.4} lambda={lambda:.3}"),
            observed,
            bound,
        ));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problem_filter_selects_subset() {
        let checks = run_checks(&[Suite::Lemma], Some(ProblemArg::Scalar)).unwrap();
        assert!(checks
            .iter()
            .all(|c| c.suite == Suite::Lemma && c.problem == ProblemArg::Scalar));
        assert_eq!(checks.len(), 18);
        assert!(run_checks(&[Suite::Cg], Some(ProblemArg::Pde)).is_err());
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let op = DenseOperator::diagonal(&[1.0, -3.0, 2.0]).unwrap();
        assert!((operator_norm_sq(&op).unwrap() - 9.0).abs() < 1e-12);
    }
}
