//! Stopping-index bound and per-iteration checks of the identities and
//! inequalities the convergence analysis rests on.

use crate::error::{Error, Result};
use crate::krylov::CgMode;
use crate::linops::{ForwardModel, LinearOperator, Vector};

use super::solver::RunOutcome;

/// Upper bound on the discrepancy stopping index:
/// `λ_max (2 q τ δ² [(q-η)τ - (η+1)])⁻¹ [ρ² + 2 Σθ]`.
pub fn kstar_bound(lambda_max: f64, q: f64, tau: f64, delta: f64, eta: f64, rho: f64, theta_sum: f64) -> Result<f64> {
    let all = [lambda_max, q, tau, delta, eta, rho, theta_sum];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("k* bound input".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k* bound needs delta > 0, got {delta}"
        )));
    }
    if !(lambda_max > 0.0 && q > 0.0 && rho >= 0.0 && theta_sum >= 0.0) {
        return Err(Error::InvalidParameter(
            "k* bound needs lambda_max > 0, q > 0, rho >= 0 and a nonnegative theta sum".into(),
        ));
    }
    let gap = (q - eta) * tau - (eta + 1.0);
    if !(gap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k* bound undefined: (q-eta)*tau - (eta+1) = {gap} is not positive"
        )));
    }
    Ok(lambda_max / (2.0 * q * tau * delta * delta * gap) * (rho * rho + 2.0 * theta_sum))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityKind {
    /// `|w_k-x|² = (1+α)|x_k-x|² - α|x_{k-1}-x|² + α(1+α)|x_k-x_{k-1}|²`
    Extrapolation,
    /// `(A A* + λI) D_k = λ (F(w_k) - y)`
    ResidualMap,
    /// `w_k - x_{k+1} = λ⁻¹ A* D_k`
    StepFromResidual,
    /// `q |F(w_k)-y| <= |D_k| <= |F(w_k)-y|`
    LinearizedResidualBounds,
    /// `(1-η) |F(x_{k+1})-y| <= (1+η) |F(w_k)-y|`
    ResidualGrowth,
    /// `|w_k-x*|² - |x_{k+1}-x*|² >= |w_k-x_{k+1}|² + 2λ⁻¹|D_k|[(q-η)|F(w_k)-y| - (η+1)δ]`
    Gain,
    /// `|x_{k+1}-x*| <= |w_k-x*|`
    Monotone,
}

impl IdentityKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Extrapolation => "extrapolation",
            Self::ResidualMap => "residual_map",
            Self::StepFromResidual => "step_from_residual",
            Self::LinearizedResidualBounds => "linearized_residual_bounds",
            Self::ResidualGrowth => "residual_growth",
            Self::Gain => "gain",
            Self::Monotone => "monotone",
        }
    }

    fn is_equality(&self) -> bool {
        matches!(self, Self::Extrapolation | Self::ResidualMap | Self::StepFromResidual)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub k: usize,
    pub kind: IdentityKind,
    /// Relative error for identities; normalized margin (negative = violated)
    /// for inequalities.
    pub value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    /// The run used truncated CG, so the step-based identities are not
    /// expected to hold.
    pub mode_mismatch: bool,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn of_kind(&self, kind: IdentityKind) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(move |c| c.kind == kind)
    }

    /// Largest relative error (identities) or deepest violation (inequalities) of a kind.
    pub fn worst(&self, kind: IdentityKind) -> Option<f64> {
        let vals = self.of_kind(kind).map(|c| c.value);
        if kind.is_equality() {
            vals.reduce(f64::max)
        } else {
            vals.reduce(f64::min)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityParams {
    pub eta: f64,
    pub q: f64,
    pub delta: f64,
    /// Relative tolerance for the equalities.
    pub tol: f64,
    /// Allowed normalized violation for the inequalities.
    pub slack: f64,
}

impl Default for IdentityParams {
    fn default() -> Self {
        Self {
            eta: 0.0,
            q: 0.0,
            delta: 0.0,
            tol: 1e-10,
            slack: 1e-10,
        }
    }
}

/// Rounding allowance per unit magnitude; every check is measured against its
/// natural scale plus this multiple of the magnitudes it was computed from.
const ROUNDING: f64 = 16.0 * f64::EPSILON;

/// Replays a run with stored iterates and evaluates every identity and
/// inequality at each step that performed a linear solve.
///
/// Gain and monotonicity need `known_solution`; without it they are skipped.
pub fn verify_iteration_identities<M: ForwardModel + ?Sized>(
    model: &M,
    y: &Vector,
    outcome: &RunOutcome,
    known_solution: Option<&Vector>,
    params: IdentityParams,
) -> Result<IdentityReport> {
    let history = outcome.history.as_ref().ok_or(Error::MissingIterates)?;
    let (xs, ws) = (&history.xs, &history.ws);
    let records = &outcome.trace.records;
    let mut checks = Vec::new();
    // relative error left after the rounding allowance `floor`
    let push_eq = |checks: &mut Vec<IdentityCheck>, k, kind, err: f64, scale: f64, floor: f64| {
        let value = (err - floor).max(0.0) / (scale + floor + f64::MIN_POSITIVE);
        checks.push(IdentityCheck {
            k,
            kind,
            value,
            passed: value <= params.tol,
        });
    };
    // lhs <= rhs, normalized margin after the rounding allowance `floor`
    let push_ineq = |checks: &mut Vec<IdentityCheck>, k, kind, lhs: f64, rhs: f64, scale: f64, floor: f64| {
        let margin = rhs - lhs;
        let margin = if margin >= 0.0 {
            margin
        } else {
            (margin + floor).min(0.0)
        };
        let value = margin / (scale + floor + f64::MIN_POSITIVE);
        checks.push(IdentityCheck {
            k,
            kind,
            value,
            passed: value >= -params.slack,
        });
    };

    let probe = match known_solution {
        Some(x) => x.clone(),
        None => Vector::zeros(model.domain_dim()),
    };

    let ones = Vector::from_fn(model.domain_dim(), |_| 1.0)?;
    let probe_norm = probe.norm();

    for (k, rec) in records.iter().enumerate() {
        let (Some(w), Some(x_cur)) = (ws.get(k), xs.get(k)) else {
            break;
        };
        if k >= 1 {
            let a = rec.alpha_k;
            let x_prev = &xs[k - 1];
            let dc = x_cur.distance(&probe)?.powi(2);
            let dp = x_prev.distance(&probe)?.powi(2);
            let dd = x_cur.distance(x_prev)?.powi(2);
            let lhs = w.distance(&probe)?.powi(2);
            let rhs = (1.0 + a) * dc - a * dp + a * (1.0 + a) * dd;
            let scale = (1.0 + a) * dc + a * dp + a * (1.0 + a) * dd;
            let unit = ROUNDING * (1.0 + a) * (x_cur.norm() + x_prev.norm() + probe_norm);
            let floor = 2.0 * unit * (lhs.sqrt() + dc.sqrt() + dp.sqrt() + dd.sqrt()) + unit * unit;
            push_eq(
                &mut checks,
                k,
                IdentityKind::Extrapolation,
                (lhs - rhs).abs(),
                scale,
                floor,
            );
        }

        if rec.cg.is_none() {
            continue;
        }
        let Some(x_next) = xs.get(k + 1) else {
            break;
        };
        let lambda = rec.lambda_k;
        let (fw, lin) = model.evaluate(w)?;
        let r = fw.sub(y)?;
        let r_norm = r.norm();
        let step = x_next.sub(w)?;
        let a_step = lin.apply(&step)?;
        let mut d = a_step.clone();
        d.axpy(1.0, &r)?;
        let d_norm = d.norm();

        let mut op_sq: f64 = 0.0;
        for u in [&r, &d] {
            if u.norm() > 0.0 {
                op_sq = op_sq.max(lin.apply(&lin.apply_adjoint(u)?)?.norm() / u.norm());
            }
        }
        let probe_out = lin.apply(&ones)?;
        op_sq = op_sq.max(probe_out.norm_sq() / ones.norm_sq());
        // rounding in D_k from the terms it is assembled from, including the
        // step recovered as x_{k+1} - w_k
        let floor_d = ROUNDING * (fw.norm() + a_step.norm() + y.norm() + op_sq.sqrt() * (w.norm() + x_next.norm()));
        let ad = lin.apply_adjoint(&d)?;

        let mut lhs_a = lin.apply(&ad)?;
        lhs_a.axpy(lambda, &d)?;
        let rhs_a = r.scaled(lambda)?;
        push_eq(
            &mut checks,
            k,
            IdentityKind::ResidualMap,
            lhs_a.distance(&rhs_a)?,
            lambda * r_norm,
            (op_sq + lambda) * floor_d,
        );

        let step_back = step.scaled(-1.0)?;
        let rhs_b = ad.scaled(1.0 / lambda)?;
        let floor_b = op_sq.sqrt() / lambda * floor_d + ROUNDING * (w.norm() + x_next.norm());
        push_eq(
            &mut checks,
            k,
            IdentityKind::StepFromResidual,
            step_back.distance(&rhs_b)?,
            step_back.norm().max(rhs_b.norm()),
            floor_b,
        );

        let bounds = IdentityKind::LinearizedResidualBounds;
        push_ineq(&mut checks, k, bounds, params.q * r_norm, d_norm, r_norm, floor_d);
        push_ineq(&mut checks, k, bounds, d_norm, r_norm, r_norm, floor_d);

        let f_next = model.apply(x_next)?;
        let next_res = f_next.distance(y)?;
        push_ineq(
            &mut checks,
            k,
            IdentityKind::ResidualGrowth,
            (1.0 - params.eta) * next_res,
            (1.0 + params.eta) * r_norm,
            r_norm.max(next_res),
            ROUNDING * (f_next.norm() + fw.norm() + y.norm()),
        );

        if let Some(xs_true) = known_solution {
            let dw = w.distance(xs_true)?.powi(2);
            let dn = x_next.distance(xs_true)?.powi(2);
            let step_sq = step_back.norm_sq();
            let bracket = (params.q - params.eta) * r_norm - (params.eta + 1.0) * params.delta;
            let rhs = step_sq + 2.0 / lambda * d_norm * bracket;
            let unit = ROUNDING * (w.norm() + x_next.norm() + xs_true.norm());
            let floor_dist = 2.0 * unit * (dw.sqrt() + dn.sqrt() + step_sq.sqrt()) + unit * unit;
            let floor_gain = floor_dist + 2.0 / lambda * floor_d * (d_norm + r_norm + floor_d);
            push_ineq(
                &mut checks,
                k,
                IdentityKind::Gain,
                rhs,
                dw - dn,
                dw.max(dn).max(step_sq),
                floor_gain,
            );
            push_ineq(&mut checks, k, IdentityKind::Monotone, dn, dw, dw.max(dn), floor_dist);
        }
    }

    Ok(IdentityReport {
        checks,
        mode_mismatch: outcome.trace.cg_mode == CgMode::Truncated,
    })
}
