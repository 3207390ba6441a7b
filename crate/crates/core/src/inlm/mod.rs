//! The inertial Levenberg-Marquardt iteration
//!
//! ```text
//! w_k     = x_k + α_k (x_k - x_{k-1})
//! x_{k+1} = w_k + s_k,   (A*A + λ_k I) s_k = A*(y - F(w_k)),   A = F'(w_k)
//! ```
//!
//! with `x_{-1} = x_0` and `α_0 = 0`.

mod config;
mod schedule;
mod solver;
mod theory;

pub use config::{DiscrepancyPolicy, SolverConfig};
pub use schedule::{
    extrapolate, inertial_weight, AlphaSchedule, InertialWeight, LambdaSchedule, ScheduleTheta, TheoryAlpha,
};
pub use solver::{
    inlm_step, run_exact, run_noisy, BestIterate, InertialLm, IterateHistory, IterateState, IterationRecord,
    RunOutcome, RunTrace, StopReason,
};
pub use theory::{
    kstar_bound, verify_iteration_identities, IdentityCheck, IdentityKind, IdentityParams, IdentityReport,
};
