//! Inertial Levenberg-Marquardt iteration for nonlinear ill-posed equations
//! `F(x) = y`, with matrix-free inner solves and two bundled test problems:
//! coefficient identification in an elliptic PDE and training of a single
//! saturated-linear neuron.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod banded;
pub mod error;
pub mod inlm;
pub mod krylov;
pub mod linops;
pub mod nn;
pub mod pde;
pub mod rng;

pub use error::{Error, Result};
pub use inlm::{
    run_exact, run_noisy, AlphaSchedule, InertialLm, LambdaSchedule, RunOutcome, RunTrace, SolverConfig, StopReason,
};
pub use krylov::{cg_normal_solve, CgConfig, CgMode, CgReport};
pub use linops::{ForwardModel, LinearOperator, Vector};
