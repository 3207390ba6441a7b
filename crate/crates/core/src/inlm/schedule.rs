use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, Error, Result};
use crate::linops::Vector;

/// A summable nonnegative sequence `θ_k`, `k >= 1`, bounding the inertial
/// energy `α_k |x_k - x_{k-1}|^2` in theory mode.
#[derive(Clone, Default)]
pub enum ScheduleTheta {
    /// `θ_k = 1/k^2`.
    #[default]
    InverseSquare,
    /// `θ_k = scale * k^(-exponent)` with `exponent > 1`.
    Power { scale: f64, exponent: f64 },
    /// Caller supplied; `total` is the sum of the series when known.
    Custom {
        term: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
        total: Option<f64>,
    },
}

impl ScheduleTheta {
    pub fn value(&self, k: usize) -> f64 {
        let kf = k.max(1) as f64;
        match self {
            Self::InverseSquare => 1.0 / (kf * kf),
            Self::Power { scale, exponent } => scale * kf.powf(-exponent),
            Self::Custom { term, .. } => term(k).max(0.0),
        }
    }

    /// `Σ_{k>=1} θ_k` where it is available in closed form or by a tail bound.
    pub fn total(&self) -> Option<f64> {
        match self {
            Self::InverseSquare => Some(std::f64::consts::PI.powi(2) / 6.0),
            Self::Power { scale, exponent } => {
                // head summed exactly, tail by the integral estimate
                let head_len = 100_000usize;
                let head: f64 = (1..=head_len).map(|k| (k as f64).powf(-exponent)).sum();
                let tail = (head_len as f64 + 0.5).powf(1.0 - exponent) / (exponent - 1.0);
                Some(scale * (head + tail))
            }
            Self::Custom { total, .. } => *total,
        }
    }

    pub fn partial_sum(&self, last: usize) -> f64 {
        (1..=last).map(|k| self.value(k)).sum()
    }

    fn validate(&self) -> Result<()> {
        if let Self::Power { scale, exponent } = self {
            if !(*scale > 0.0 && scale.is_finite()) || !(*exponent > 1.0 && exponent.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "theta power schedule needs scale > 0 and exponent > 1, got ({scale}, {exponent})"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ScheduleTheta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InverseSquare => write!(f, "InverseSquare"),
            Self::Power { scale, exponent } => f
                .debug_struct("Power")
                .field("scale", scale)
                .field("exponent", exponent)
                .finish(),
            Self::Custom { total, .. } => f.debug_struct("Custom").field("total", total).finish(),
        }
    }
}

/// Ball-constrained inertial weights.
#[derive(Clone, Debug)]
pub struct TheoryAlpha {
    /// Upper bound `α < 1` on every weight.
    pub alpha_cap: f64,
    pub theta: ScheduleTheta,
    /// Radius of the ball around `x_0` that iterates must stay in.
    pub rho: f64,
    /// Enforce `α_k <= α_{k-1}` for `k >= 2`.
    pub monotone: bool,
}

#[derive(Clone, Debug)]
pub enum AlphaSchedule {
    /// The same weight at every step; `Constant(0.0)` is plain LM.
    Constant(f64),
    Theory(TheoryAlpha),
}

impl AlphaSchedule {
    pub fn theory(alpha_cap: f64, rho: f64) -> Self {
        Self::Theory(TheoryAlpha {
            alpha_cap,
            theta: ScheduleTheta::InverseSquare,
            rho,
            monotone: false,
        })
    }

    pub(crate) fn validate(&self, warnings: &mut Vec<String>) -> Result<()> {
        match self {
            Self::Constant(a) => {
                if !(*a >= 0.0 && *a <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "constant inertial weight must lie in [0, 1], got {a}"
                    )));
                }
                if *a >= 1.0 {
                    warnings.push(format!("inertial weight {a} >= 1 is outside the convergence theory"));
                }
            }
            Self::Theory(t) => {
                if !(t.alpha_cap >= 0.0 && t.alpha_cap < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha_cap must lie in [0, 1), got {}",
                        t.alpha_cap
                    )));
                }
                if !(t.rho > 0.0 && t.rho.is_finite()) {
                    return Err(Error::InvalidParameter(format!("rho must be positive, got {}", t.rho)));
                }
                t.theta.validate()?;
            }
        }
        Ok(())
    }
}

/// Regularization parameters `λ_k`. A sequence shorter than the run repeats
/// its last value.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaSchedule {
    values: Vec<f64>,
    pub lambda_max: Option<f64>,
}

impl LambdaSchedule {
    pub fn constant(lambda: f64) -> Self {
        Self {
            values: vec![lambda],
            lambda_max: None,
        }
    }

    pub fn sequence(values: Vec<f64>) -> Self {
        Self {
            values,
            lambda_max: None,
        }
    }

    pub fn with_max(mut self, lambda_max: f64) -> Self {
        self.lambda_max = Some(lambda_max);
        self
    }

    pub fn at(&self, k: usize) -> f64 {
        self.values[k.min(self.values.len() - 1)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest upper bound over the whole run: `lambda_max` if set, else the
    /// largest listed value.
    pub fn upper_bound(&self) -> f64 {
        self.lambda_max
            .unwrap_or_else(|| self.values.iter().cloned().fold(0.0, f64::max))
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter("lambda schedule is empty".into()));
        }
        if let Some(bad) = self.values.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!("lambda_k must be positive, got {bad}")));
        }
        if let Some(max) = self.lambda_max {
            if let Some(bad) = self.values.iter().find(|l| **l > max) {
                return Err(Error::InvalidParameter(format!(
                    "lambda_k = {bad} exceeds lambda_max = {max}"
                )));
            }
        }
        Ok(())
    }
}

/// `x_cur + α (x_cur - x_prev)`.
pub fn extrapolate(x_cur: &Vector, x_prev: &Vector, alpha: f64) -> Result<Vector> {
    check_dim("extrapolation", x_cur.len(), x_prev.len())?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "inertial weight must be finite and nonnegative, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(x_cur.clone());
    }
    Vector::new(
        x_cur
            .iter()
            .zip(x_prev.iter())
            .map(|(c, p)| c + alpha * (c - p))
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InertialWeight {
    pub value: f64,
    /// Theory mode found `|x_k - x_0| > ρ`; the weight was forced to zero.
    pub ball_exit: bool,
}

/// The inertial weight `α_k` for `k >= 1`.
///
/// Theory mode returns
/// `min{ θ_k/d², min{θ_k, ρ - |x_k - x_0|}/d, α }` with `d = |x_k - x_{k-1}|`,
/// and zero when `d = 0`.
pub fn inertial_weight(
    x_cur: &Vector,
    x_prev: &Vector,
    x0: &Vector,
    k: usize,
    sched: &AlphaSchedule,
) -> Result<InertialWeight> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "inertial weights are defined for k >= 1".into(),
        ));
    }
    let d = x_cur.distance(x_prev)?;
    let zero = InertialWeight {
        value: 0.0,
        ball_exit: false,
    };
    if d == 0.0 {
        return Ok(zero);
    }
    match sched {
        AlphaSchedule::Constant(a) => Ok(InertialWeight {
            value: a.max(0.0),
            ball_exit: false,
        }),
        AlphaSchedule::Theory(t) => {
            let theta = t.theta.value(k);
            let slack = t.rho - x_cur.distance(x0)?;
            if slack < 0.0 {
                return Ok(InertialWeight {
                    value: 0.0,
                    ball_exit: true,
                });
            }
            let value = (theta / (d * d)).min(theta.min(slack) / d).min(t.alpha_cap);
            Ok(InertialWeight {
                value: value.max(0.0),
                ball_exit: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec()).unwrap()
    }

    #[test]
    fn extrapolate_examples() {
        let x = v(&[1.0, 0.0]);
        let p = v(&[0.0, 0.0]);
        assert_eq!(extrapolate(&x, &p, 0.0).unwrap(), x);
        assert_eq!(extrapolate(&x, &x, 0.7).unwrap(), x);
        assert_eq!(extrapolate(&x, &p, 0.5).unwrap(), v(&[1.5, 0.0]));
        assert!(extrapolate(&x, &v(&[1.0]), 0.5).is_err());
    }

    #[test]
    fn extrapolate_zero_weight_keeps_signed_zero_bits() {
        let x = v(&[-0.0, 1.0]);
        let p = v(&[3.0, -2.0]);
        let w = extrapolate(&x, &p, 0.0).unwrap();
        assert_eq!(w[0].to_bits(), (-0.0f64).to_bits());
    }

    #[test]
    fn weight_is_zero_without_displacement() {
        let x = v(&[1.0, 2.0]);
        let sched = AlphaSchedule::theory(0.5, 10.0);
        let w = inertial_weight(&x, &x, &Vector::zeros(2), 3, &sched).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(!w.ball_exit);
    }

    #[test]
    fn weight_three_way_minimum() {
        // θ_k = 1, |x_k - x_{k-1}| = 2, ρ - |x_k - x_0| = 10, cap 0.5
        let sched = AlphaSchedule::Theory(TheoryAlpha {
            alpha_cap: 0.5,
            theta: ScheduleTheta::Custom {
                term: Arc::new(|_| 1.0),
                total: None,
            },
            rho: 12.0,
            monotone: false,
        });
        let x_cur = v(&[2.0, 0.0]);
        let x_prev = v(&[0.0, 0.0]);
        let x0 = v(&[0.0, 0.0]);
        let w = inertial_weight(&x_cur, &x_prev, &x0, 1, &sched).unwrap();
        assert_eq!(w.value, 0.25);
    }

    #[test]
    fn constant_weight_ignores_iterates() {
        let sched = AlphaSchedule::Constant(0.6);
        let w = inertial_weight(&v(&[5.0]), &v(&[-3.0]), &v(&[100.0]), 7, &sched).unwrap();
        assert_eq!(w.value, 0.6);
    }

    #[test]
    fn ball_exit_forces_zero_weight() {
        let sched = AlphaSchedule::theory(0.9, 1.0);
        let w = inertial_weight(&v(&[3.0]), &v(&[2.0]), &v(&[0.0]), 2, &sched).unwrap();
        assert_eq!(w.value, 0.0);
        assert!(w.ball_exit);
    }

    #[test]
    fn weight_requires_positive_index() {
        let sched = AlphaSchedule::Constant(0.2);
        assert!(inertial_weight(&v(&[1.0]), &v(&[0.0]), &v(&[0.0]), 0, &sched).is_err());
    }

    #[test]
    fn theta_totals() {
        let inv = ScheduleTheta::InverseSquare;
        assert!((inv.total().unwrap() - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        assert!(inv.partial_sum(1000) < inv.total().unwrap());
        let pow = ScheduleTheta::Power {
            scale: 1.0,
            exponent: 2.0,
        };
        assert!((pow.total().unwrap() - inv.total().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lambda_schedule_validation() {
        assert!(LambdaSchedule::constant(1.0).validate().is_ok());
        assert!(LambdaSchedule::constant(0.0).validate().is_err());
        assert!(LambdaSchedule::sequence(vec![]).validate().is_err());
        assert!(LambdaSchedule::sequence(vec![1.0, 5.0])
            .with_max(2.0)
            .validate()
            .is_err());
        let seq = LambdaSchedule::sequence(vec![1.0, 2.0, 3.0]);
        assert_eq!(seq.at(0), 1.0);
        assert_eq!(seq.at(10), 3.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn theory_weights_respect_summability_and_ball(
                cur in proptest::collection::vec(-3.0..3.0f64, 3),
                prev in proptest::collection::vec(-3.0..3.0f64, 3),
                k in 1usize..500,
                cap in 0.0..0.99f64,
                rho in 0.1..10.0f64,
            ) {
                let x_cur = Vector::new(cur).unwrap();
                let x_prev = Vector::new(prev).unwrap();
                let x0 = Vector::zeros(3);
                let sched = AlphaSchedule::theory(cap, rho);
                let w = inertial_weight(&x_cur, &x_prev, &x0, k, &sched).unwrap();
                let d = x_cur.distance(&x_prev).unwrap();
                let theta = 1.0 / (k as f64).powi(2);
                prop_assert!(w.value >= 0.0 && w.value <= cap);
                if d > 0.0 && !w.ball_exit {
                    prop_assert!(w.value * d * d <= theta * (1.0 + 1e-12));
                    let slack = rho - x_cur.norm();
                    prop_assert!(w.value * d <= slack * (1.0 + 1e-12) + 1e-15);
                }
            }
        }
    }
}
