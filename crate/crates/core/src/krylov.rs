//! Conjugate gradients on the regularized normal equations
//! `(A*A + λI) s = A* r`, using only the actions of `A` and `A*`.
//!
//! One iteration is one search-direction update. No preconditioning; the
//! shift `λI` bounds the spectrum below by `λ`.

use crate::error::{check_dim, Error, Result};
use crate::linops::{inner, ForwardModel, LinearOperator, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgMode {
    /// Exactly `max_iters` iterations unless the system is solved exactly earlier.
    Truncated,
    /// Stop once `|(A*A+λI)s - A*r| <= rel_tol |A*r|` (or at `max_iters`).
    ToTolerance,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgConfig {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub mode: CgMode,
}

impl CgConfig {
    pub fn truncated(steps: usize) -> Self {
        Self {
            max_iters: steps,
            rel_tol: 0.0,
            mode: CgMode::Truncated,
        }
    }

    pub fn to_tolerance(rel_tol: f64, max_iters: usize) -> Self {
        Self {
            max_iters,
            rel_tol,
            mode: CgMode::ToTolerance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("CG max_iters must be positive".into()));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "CG rel_tol must be a finite nonnegative number, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

impl Default for CgConfig {
    fn default() -> Self {
        Self::to_tolerance(1e-12, 1000)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations_used: usize,
    /// Recursively updated normal-equation residual norm at exit.
    pub final_normal_residual: f64,
    pub breakdown: bool,
}

/// Linearizes `model` at `lin_point` and solves `(A*A + λI) s = A* residual`.
pub fn cg_normal_solve<M: ForwardModel + ?Sized>(
    model: &M,
    lin_point: &Vector,
    residual: &Vector,
    lambda: f64,
    cfg: &CgConfig,
) -> Result<(Vector, CgReport)> {
    check_dim("CG linearization point", model.domain_dim(), lin_point.len())?;
    let op = model.linearize(lin_point)?;
    cg_normal_solve_with(&op, residual, lambda, cfg)
}

/// Same as [`cg_normal_solve`] with an already linearized operator.
pub fn cg_normal_solve_with<A: LinearOperator + ?Sized>(
    op: &A,
    residual: &Vector,
    lambda: f64,
    cfg: &CgConfig,
) -> Result<(Vector, CgReport)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "regularization parameter must be positive and finite, got {lambda}"
        )));
    }
    cfg.validate()?;
    check_dim("CG residual", op.range_dim(), residual.len())?;

    let rhs = op.apply_adjoint(residual)?;
    let rhs_norm = rhs.norm();
    let mut step = Vector::zeros(op.domain_dim());
    let mut report = CgReport {
        iterations_used: 0,
        final_normal_residual: rhs_norm,
        breakdown: false,
    };
    if rhs_norm == 0.0 {
        return Ok((step, report));
    }

    let target = cfg.rel_tol * rhs_norm;
    let mut res = rhs;
    let mut dir = res.clone();
    let mut res_sq = res.norm_sq();

    while report.iterations_used < cfg.max_iters {
        let mut q = op.apply_adjoint(&op.apply(&dir)?)?;
        q.axpy(lambda, &dir)?;
        let curvature = inner(&dir, &q)?;
        if !(curvature > f64::MIN_POSITIVE) {
            report.breakdown = true;
            break;
        }
        let a = res_sq / curvature;
        step.axpy(a, &dir)?;
        res.axpy(-a, &q)?;
        report.iterations_used += 1;

        let res_sq_new = res.norm_sq();
        report.final_normal_residual = res_sq_new.sqrt();
        if res_sq_new == 0.0 {
            break;
        }
        if cfg.mode == CgMode::ToTolerance && report.final_normal_residual <= target {
            break;
        }
        let beta = res_sq_new / res_sq;
        dir = {
            let mut d = dir.scaled(beta)?;
            d.axpy(1.0, &res)?;
            d
        };
        res_sq = res_sq_new;
    }
    Ok((step, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{AffineModel, DenseOperator};
    use crate::rng;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec()).unwrap()
    }

    #[test]
    fn zero_residual_gives_zero_step() {
        let model = AffineModel::linear(DenseOperator::diagonal(&[1.0, 2.0]).unwrap());
        let (s, rep) =
            cg_normal_solve(&model, &Vector::zeros(2), &Vector::zeros(2), 1.0, &CgConfig::default()).unwrap();
        assert_eq!(s, Vector::zeros(2));
        assert_eq!(rep.iterations_used, 0);
        assert!(!rep.breakdown);
    }

    #[test]
    fn diagonal_example() {
        // diag(2,5) s = (1,2)
        let model = AffineModel::linear(DenseOperator::diagonal(&[1.0, 2.0]).unwrap());
        let (s, rep) = cg_normal_solve(
            &model,
            &Vector::zeros(2),
            &v(&[1.0, 1.0]),
            1.0,
            &CgConfig::to_tolerance(1e-14, 50),
        )
        .unwrap();
        assert!((s[0] - 0.5).abs() < 1e-14);
        assert!((s[1] - 0.4).abs() < 1e-14);
        assert!(rep.iterations_used <= 2);
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        let model = AffineModel::scalar(2.0).unwrap();
        for lambda in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            let err = cg_normal_solve(&model, &v(&[0.0]), &v(&[1.0]), lambda, &CgConfig::default());
            assert!(matches!(err, Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn rejects_wrong_residual_dimension() {
        let model = AffineModel::scalar(2.0).unwrap();
        let err = cg_normal_solve(&model, &v(&[0.0]), &v(&[1.0, 2.0]), 1.0, &CgConfig::default());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn truncated_mode_runs_exact_number_of_steps() {
        let mut rng = rng::seeded(3);
        let data = rng::normal_vector(&mut rng, 30 * 12).into_vec();
        let model = AffineModel::linear(DenseOperator::new(30, 12, data).unwrap());
        let r = rng::normal_vector(&mut rng, 30);
        for steps in [1, 2, 3, 5] {
            let (_, rep) = cg_normal_solve(&model, &Vector::zeros(12), &r, 0.1, &CgConfig::truncated(steps)).unwrap();
            assert_eq!(rep.iterations_used, steps);
        }
    }

    #[test]
    fn large_lambda_approaches_scaled_gradient() {
        let mut rng = rng::seeded(4);
        let data = rng::normal_vector(&mut rng, 6 * 4).into_vec();
        let op = DenseOperator::new(6, 4, data).unwrap();
        let op_norm_sq: f64 = (0..6)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| op.get(i, j).powi(2))
            .sum();
        let r = rng::normal_vector(&mut rng, 6);
        let rhs = op.apply_adjoint(&r).unwrap();
        for lambda in [1e6 * op_norm_sq, 1e8 * op_norm_sq] {
            let (s, _) = cg_normal_solve_with(&op, &r, lambda, &CgConfig::to_tolerance(1e-14, 100)).unwrap();
            let err = s.scaled(lambda).unwrap().distance(&rhs).unwrap() / rhs.norm();
            assert!(err <= 10.0 / lambda, "lambda {lambda}: {err}");
        }
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut rng = rng::seeded(8);
        let data = rng::normal_vector(&mut rng, 9 * 9).into_vec();
        let op = DenseOperator::new(9, 9, data).unwrap();
        let r = rng::normal_vector(&mut rng, 9);
        let cfg = CgConfig::to_tolerance(1e-12, 100);
        let (a, _) = cg_normal_solve_with(&op, &r, 0.3, &cfg).unwrap();
        let (b, _) = cg_normal_solve_with(&op, &r, 0.3, &cfg).unwrap();
        let bits = |x: &Vector| x.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }
}
