use crate::error::{check_dim, Error, Result};
use crate::krylov::{cg_normal_solve_with, CgMode, CgReport};
use crate::linops::{ForwardModel, Vector};

use super::config::{DiscrepancyPolicy, SolverConfig};
use super::schedule::{extrapolate, inertial_weight, AlphaSchedule};

/// Iteration state at index `k`: `x_{k-1}`, `x_k`, `w_k` and `α_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub k: usize,
    pub x_prev: Vector,
    pub x_cur: Vector,
    pub w: Vector,
    pub alpha_k: f64,
    /// `α_k` was forced to zero because `x_k` left the ball of radius ρ.
    pub ball_exit: bool,
}

impl IterateState {
    /// `x_{-1} = x_0`, `w_0 = x_0`, `α_0 = 0`.
    pub fn initial(x0: Vector) -> Self {
        Self {
            k: 0,
            x_prev: x0.clone(),
            w: x0.clone(),
            x_cur: x0,
            alpha_k: 0.0,
            ball_exit: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub alpha_k: f64,
    pub lambda_k: f64,
    /// `|F(w_k) - y|`
    pub residual_norm: f64,
    /// `|s_k|`; zero on the terminating record.
    pub step_norm: f64,
    /// `|x_k - x†|` when the truth is known.
    pub distance_to_truth: Option<f64>,
    /// `None` on the terminating record, where no linear solve happens.
    pub cg: Option<CgReport>,
    pub ball_exit: bool,
    /// `α_k |x_k - x_{k-1}|^2`
    pub inertial_term: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Discrepancy,
    ExactFit,
    MaxIters,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Discrepancy => "discrepancy",
            Self::ExactFit => "exact_fit",
            Self::MaxIters => "max_iters",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BestIterate {
    pub k: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    /// One record per evaluated `w_k`, contiguous from `k = 0`.
    pub records: Vec<IterationRecord>,
    pub k_star: Option<usize>,
    pub stop_reason: StopReason,
    /// Threshold the residual was compared against (`τδ`, or the exact-fit tolerance).
    pub stop_threshold: f64,
    pub cg_mode: CgMode,
    /// Iterate `x_k` closest to the truth, when the truth is known.
    pub best: Option<BestIterate>,
    pub warnings: Vec<String>,
}

impl RunTrace {
    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("a trace always holds the k = 0 record")
    }

    /// `Σ_k α_k |x_k - x_{k-1}|^2` over the run.
    pub fn inertial_energy(&self) -> f64 {
        self.records.iter().map(|r| r.inertial_term).sum()
    }
}

/// `x_0, x_1, ...` and `w_0, w_1, ...` of a run.
///
/// After a stop at index `k`, `xs` also holds `x_{k+1} = w_k`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IterateHistory {
    pub xs: Vec<Vector>,
    pub ws: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    /// `w` at the last evaluated index (`x_{k*+1} = w_{k*}` after a stop).
    pub final_iterate: Vector,
    pub trace: RunTrace,
    pub history: Option<IterateHistory>,
    pub best_iterate: Option<Vector>,
    /// `w_{k*}` when the discrepancy index was recorded without stopping.
    pub discrepancy_iterate: Option<Vector>,
}

/// Inertial Levenberg-Marquardt driver bound to a model and a configuration.
pub struct InertialLm<'m, M: ForwardModel + ?Sized> {
    model: &'m M,
    cfg: SolverConfig,
    truth: Option<Vector>,
    warnings: Vec<String>,
}

enum StopRule {
    Exact(f64),
    Noisy(f64, DiscrepancyPolicy),
}

impl<'m, M: ForwardModel + ?Sized> InertialLm<'m, M> {
    pub fn new(model: &'m M, cfg: SolverConfig) -> Result<Self> {
        let warnings = cfg.validate()?;
        Ok(Self {
            model,
            cfg,
            truth: None,
            warnings,
        })
    }

    /// Log `|x_k - x†|` for every record and track the closest iterate.
    pub fn with_truth(mut self, truth: Vector) -> Result<Self> {
        check_dim("ground truth", self.model.domain_dim(), truth.len())?;
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Exact-data iteration: stops once `|F(w_k) - y|` drops to the exact-fit
    /// tolerance.
    pub fn run_exact(&self, y: &Vector, x0: &Vector) -> Result<RunOutcome> {
        let tol = self.cfg.exact_zero_tol.unwrap_or(1e-13 * y.norm());
        self.run(y, x0, StopRule::Exact(tol))
    }

    /// Noisy-data iteration with the discrepancy principle `|F(w_k) - y^δ| <= τδ`.
    pub fn run_noisy(&self, y_delta: &Vector, x0: &Vector) -> Result<RunOutcome> {
        let threshold = self.cfg.tau * self.cfg.delta;
        self.run(y_delta, x0, StopRule::Noisy(threshold, self.cfg.discrepancy))
    }

    /// One step from `state`: solve at `w_k`, form `x_{k+1}`, `α_{k+1}` and `w_{k+1}`.
    pub fn step(&self, state: &IterateState, y: &Vector, x0: &Vector) -> Result<(IterateState, IterationRecord)> {
        self.check_inputs(y, x0)?;
        check_dim("iterate", self.model.domain_dim(), state.w.len())?;
        let (fw, lin) = self.model.evaluate(&state.w)?;
        let residual = y.sub(&fw)?;
        let residual_norm = residual.norm();
        let distance = self.distance(&state.x_cur)?;
        self.advance(state, &lin, &residual, residual_norm, distance, x0)
    }

    fn check_inputs(&self, y: &Vector, x0: &Vector) -> Result<()> {
        check_dim("data", self.model.range_dim(), y.len())?;
        check_dim("initial guess", self.model.domain_dim(), x0.len())
    }

    fn distance(&self, x: &Vector) -> Result<Option<f64>> {
        self.truth.as_ref().map(|t| x.distance(t)).transpose()
    }

    fn advance<L: crate::linops::LinearOperator>(
        &self,
        state: &IterateState,
        lin: &L,
        residual: &Vector,
        residual_norm: f64,
        distance: Option<f64>,
        x0: &Vector,
    ) -> Result<(IterateState, IterationRecord)> {
        let k = state.k;
        let lambda = self.cfg.lambda.at(k);
        let (step, report) = cg_normal_solve_with(lin, residual, lambda, &self.cfg.cg)?;
        let x_next = state.w.add(&step)?;

        let weight = inertial_weight(&x_next, &state.x_cur, x0, k + 1, &self.cfg.alpha)?;
        let mut alpha_next = weight.value;
        if let AlphaSchedule::Theory(t) = &self.cfg.alpha {
            if t.monotone && k >= 1 {
                alpha_next = alpha_next.min(state.alpha_k);
            }
        }
        let w_next = extrapolate(&x_next, &state.x_cur, alpha_next)?;

        let record = IterationRecord {
            k,
            alpha_k: state.alpha_k,
            lambda_k: lambda,
            residual_norm,
            step_norm: step.norm(),
            distance_to_truth: distance,
            cg: Some(report),
            ball_exit: state.ball_exit,
            inertial_term: state.alpha_k * state.x_cur.distance(&state.x_prev)?.powi(2),
        };
        let next = IterateState {
            k: k + 1,
            x_prev: state.x_cur.clone(),
            x_cur: x_next,
            w: w_next,
            alpha_k: alpha_next,
            ball_exit: weight.ball_exit,
        };
        Ok((next, record))
    }

    fn run(&self, y: &Vector, x0: &Vector, rule: StopRule) -> Result<RunOutcome> {
        self.check_inputs(y, x0)?;
        let (threshold, policy) = match rule {
            StopRule::Exact(t) => (t, DiscrepancyPolicy::Stop),
            StopRule::Noisy(t, p) => (t, p),
        };
        let satisfied_reason = match rule {
            StopRule::Exact(_) => StopReason::ExactFit,
            StopRule::Noisy(..) => StopReason::Discrepancy,
        };

        let mut state = IterateState::initial(x0.clone());
        let mut records = Vec::new();
        let mut warnings = self.warnings.clone();
        let mut history = self.cfg.keep_iterates.then(IterateHistory::default);
        let mut best: Option<(BestIterate, Vector)> = None;
        let mut k_star = None;
        let mut discrepancy_iterate = None;

        let stop_reason = loop {
            let k = state.k;
            let (fw, lin) = self.model.evaluate(&state.w)?;
            let residual = y.sub(&fw)?;
            let residual_norm = residual.norm();
            if !residual_norm.is_finite() {
                return Err(Error::NonFinite(format!("residual at iteration {k}")));
            }
            let distance = self.distance(&state.x_cur)?;
            if let Some(d) = distance {
                if best.as_ref().is_none_or(|(b, _)| d < b.distance) {
                    best = Some((BestIterate { k, distance: d }, state.x_cur.clone()));
                }
            }
            if state.ball_exit {
                warnings.push(format!("iterate x_{k} left the ball of radius rho; alpha_{k} set to 0"));
            }
            if let Some(h) = history.as_mut() {
                h.xs.push(state.x_cur.clone());
                h.ws.push(state.w.clone());
            }

            let satisfied = residual_norm <= threshold;
            let terminal = || IterationRecord {
                k,
                alpha_k: state.alpha_k,
                lambda_k: self.cfg.lambda.at(k),
                residual_norm,
                step_norm: 0.0,
                distance_to_truth: distance,
                cg: None,
                ball_exit: state.ball_exit,
                inertial_term: state.alpha_k * state.x_cur.distance(&state.x_prev).unwrap_or(0.0).powi(2),
            };

            if satisfied && k_star.is_none() {
                k_star = Some(k);
                if policy == DiscrepancyPolicy::Stop {
                    records.push(terminal());
                    if let Some(h) = history.as_mut() {
                        h.xs.push(state.w.clone());
                    }
                    break satisfied_reason;
                }
                discrepancy_iterate = Some(state.w.clone());
            }
            if k >= self.cfg.max_outer_iters {
                records.push(terminal());
                break StopReason::MaxIters;
            }

            let (next, record) = self.advance(&state, &lin, &residual, residual_norm, distance, x0)?;
            records.push(record);
            state = next;
        };

        let (best, best_iterate) = match best {
            Some((b, x)) => (Some(b), Some(x)),
            None => (None, None),
        };
        Ok(RunOutcome {
            final_iterate: state.w,
            trace: RunTrace {
                records,
                k_star,
                stop_reason,
                stop_threshold: threshold,
                cg_mode: self.cfg.cg.mode,
                best,
                warnings,
            },
            history,
            best_iterate,
            discrepancy_iterate,
        })
    }
}

/// One iteration of the method from `state`; see [`InertialLm::step`].
pub fn inlm_step<M: ForwardModel + ?Sized>(
    model: &M,
    state: &IterateState,
    y: &Vector,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<(IterateState, IterationRecord)> {
    InertialLm::new(model, cfg.clone())?.step(state, y, x0)
}

pub fn run_exact<M: ForwardModel + ?Sized>(
    model: &M,
    y: &Vector,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<RunOutcome> {
    InertialLm::new(model, cfg.clone())?.run_exact(y, x0)
}

pub fn run_noisy<M: ForwardModel + ?Sized>(
    model: &M,
    y_delta: &Vector,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<RunOutcome> {
    InertialLm::new(model, cfg.clone())?.run_noisy(y_delta, x0)
}
