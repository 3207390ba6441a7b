use crate::error::{Error, Result};
use crate::krylov::CgConfig;

use super::schedule::{AlphaSchedule, LambdaSchedule};

/// What `run_noisy` does once the discrepancy principle is met.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiscrepancyPolicy {
    /// Stop at the first `k` with `|F(w_k) - y| <= τδ`.
    #[default]
    Stop,
    /// Note that index as `k_star` but keep iterating to `max_outer_iters`,
    /// e.g. to record the full semi-convergence curve.
    Record,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub alpha: AlphaSchedule,
    pub lambda: LambdaSchedule,
    /// Discrepancy factor τ.
    pub tau: f64,
    /// Noise level δ.
    pub delta: f64,
    pub cg: CgConfig,
    pub max_outer_iters: usize,
    /// Stand-in for `F(w_k) = y` in the exact-data iteration. `None` means
    /// `1e-13 * |y|`.
    pub exact_zero_tol: Option<f64>,
    /// Tangential cone constant η, when known.
    pub eta: Option<f64>,
    /// Constant `q ∈ (η, 1)` tying λ_k to the operator bound.
    pub q: Option<f64>,
    /// Bound `C` on `|F'(x)|` near `x_0`.
    pub op_bound: Option<f64>,
    pub discrepancy: DiscrepancyPolicy,
    /// Keep every `x_k` and `w_k` in the outcome (needed by the identity checks).
    pub keep_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: AlphaSchedule::Constant(0.0),
            lambda: LambdaSchedule::constant(1.0),
            tau: 1.0,
            delta: 0.0,
            cg: CgConfig::default(),
            max_outer_iters: 100,
            exact_zero_tol: None,
            eta: None,
            q: None,
            op_bound: None,
            discrepancy: DiscrepancyPolicy::Stop,
            keep_iterates: false,
        }
    }
}

impl SolverConfig {
    /// Checks hard constraints and returns advisory warnings for theory
    /// conditions that are violated but do not prevent a run.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        self.alpha.validate(&mut warnings)?;
        self.lambda.validate()?;
        self.cg.validate()?;
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "delta must be nonnegative, got {}",
                self.delta
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidParameter("max_outer_iters must be positive".into()));
        }
        if let Some(tol) = self.exact_zero_tol {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "exact_zero_tol must be nonnegative, got {tol}"
                )));
            }
        }
        if let Some(eta) = self.eta {
            if !(0.0..1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!("eta must lie in [0, 1), got {eta}")));
            }
        }
        if let Some(q) = self.q {
            let eta = self.eta.unwrap_or(0.0);
            if !(q > eta && q < 1.0) {
                return Err(Error::InvalidParameter(format!("q must lie in (eta, 1), got {q}")));
            }
        }
        if let Some(c) = self.op_bound {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "operator bound must be positive, got {c}"
                )));
            }
        }

        if let (Some(eta), Some(q)) = (self.eta, self.q) {
            let tau_min = (eta + 1.0) / (q - eta);
            if self.tau <= tau_min {
                warnings.push(format!(
                    "tau = {} does not exceed (eta+1)/(q-eta) = {tau_min}",
                    self.tau
                ));
            }
        }
        if let (Some(q), Some(c)) = (self.q, self.op_bound) {
            let lambda_min = q * c * c / (1.0 - q);
            if let Some(bad) = self.lambda.values().iter().find(|l| **l <= lambda_min) {
                warnings.push(format!("lambda_k = {bad} does not exceed q C^2 / (1-q) = {lambda_min}"));
            }
        }
        Ok(warnings)
    }
}
