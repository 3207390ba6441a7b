//! Matrix-free operators compared against explicitly assembled dense matrices.

use inlm_core::krylov::{cg_normal_solve, CgConfig};
use inlm_core::linops::{
    check_adjoint, check_jacobian_fd, AffineModel, DenseOperator, ForwardModel, LinearOperator, Vector,
};
use inlm_core::nn::{synth_dataset, NnParams, SynthSpec};
use inlm_core::pde::{self, EllipticProblem};
use inlm_core::rng;
use nalgebra::{DMatrix, DVector};

fn to_na(v: &Vector) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// Columns `A e_j` of a linear operator.
fn dense_of<L: LinearOperator>(op: &L) -> DMatrix<f64> {
    let (m, n) = (op.range_dim(), op.domain_dim());
    let mut a = DMatrix::zeros(m, n);
    for j in 0..n {
        let e = Vector::from_fn(n, |i| if i == j { 1.0 } else { 0.0 }).unwrap();
        a.set_column(j, &to_na(&op.apply(&e).unwrap()));
    }
    a
}

/// `-Δ_n + diag(c)` assembled entry by entry from the stencil definition.
fn assembled_stencil(n: usize, c: &Vector) -> DMatrix<f64> {
    let h = 1.0 / (n as f64 + 1.0);
    let n2 = n * n;
    let mut a = DMatrix::zeros(n2, n2);
    for j in 0..n {
        for i in 0..n {
            let p = j * n + i;
            a[(p, p)] = 4.0 / (h * h) + c[p];
            if i > 0 {
                a[(p, p - 1)] = -1.0 / (h * h);
            }
            if i + 1 < n {
                a[(p, p + 1)] = -1.0 / (h * h);
            }
            if j > 0 {
                a[(p, p - n)] = -1.0 / (h * h);
            }
            if j + 1 < n {
                a[(p, p + n)] = -1.0 / (h * h);
            }
        }
    }
    a
}

fn random_coefficient(n: usize, seed: u64) -> Vector {
    rng::uniform_vector(&mut rng::seeded(seed), n * n, 0.0, 20.0)
}

fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[test]
fn cg_matches_dense_direct_solve() {
    let mut stream = rng::seeded(100);
    for trial in 0..20 {
        let m = 1 + trial % 16;
        let n = 1 + (trial * 7) % 16;
        let data = rng::normal_vector(&mut stream, m * n).into_vec();
        let op = DenseOperator::new(m, n, data.clone()).unwrap();
        let model = AffineModel::linear(op);
        let r = rng::normal_vector(&mut stream, m);
        let lambda = 0.5;
        let (s, _) = cg_normal_solve(
            &model,
            &Vector::zeros(n),
            &r,
            lambda,
            &CgConfig::to_tolerance(1e-12, 1000),
        )
        .unwrap();

        let a = DMatrix::from_row_slice(m, n, &data);
        let lhs = a.transpose() * &a + DMatrix::identity(n, n) * lambda;
        let rhs = a.transpose() * to_na(&r);
        let exact = lhs.cholesky().unwrap().solve(&rhs);
        assert!(rel(&to_na(&s), &exact) <= 1e-8, "trial {trial}");
    }
}

#[test]
fn stencil_matches_assembled_matrix() {
    let n = 8;
    let c = random_coefficient(n, 1);
    let v = rng::normal_vector(&mut rng::seeded(2), n * n);
    let got = to_na(&pde::stencil_apply(n, &c, &v).unwrap());
    let want = assembled_stencil(n, &c) * to_na(&v);
    assert!((got - &want).norm() <= 1e-12 * want.norm());
}

#[test]
fn forward_solve_matches_dense_factorization() {
    let n = 8;
    let c = random_coefficient(n, 3);
    let z = rng::uniform_vector(&mut rng::seeded(4), n * n, 0.0, 200.0);
    let prob = EllipticProblem::new(n, z.clone()).unwrap();
    let u = pde::forward_solve(&prob, &c).unwrap();
    let exact = assembled_stencil(n, &c).lu().solve(&to_na(&z)).unwrap();
    assert!(rel(&to_na(&u), &exact) <= 1e-8);
}

#[test]
fn pde_jacobian_and_adjoint_match_dense_oracle() {
    let n = 8;
    let (prob, _) = pde::make_phantom(n).unwrap();
    let c = random_coefficient(n, 5);
    let u = pde::forward_solve(&prob, &c).unwrap();
    // F'(c) = -L_c⁻¹ diag(u)
    let l_inv = assembled_stencil(n, &c).try_inverse().unwrap();
    let jac = -(&l_inv * DMatrix::from_diagonal(&to_na(&u)));

    let lin = prob.linearize(&c).unwrap();
    let got = dense_of(&lin);
    assert!((&got - &jac).norm() <= 1e-10 * jac.norm());

    let r = rng::normal_vector(&mut rng::seeded(6), n * n);
    let adj = pde::pde_adjoint_apply(&prob, &c, &u, &r).unwrap();
    let want = jac.transpose() * to_na(&r);
    assert!(rel(&to_na(&adj), &want) <= 1e-10);

    let disc = check_adjoint(&prob, &c, 100, 7).unwrap();
    assert!(disc <= 1e-10, "{disc}");
}

#[test]
fn pde_finite_differences() {
    for n in [4, 8, 16] {
        let (prob, ph) = pde::make_phantom(n).unwrap();
        let h = rng::normal_vector(&mut rng::seeded(n as u64), n * n);
        let errs = check_jacobian_fd(&prob, &ph.c_true, &h, &[1e-6]).unwrap();
        assert!(errs[0] <= 1e-5, "n = {n}: {}", errs[0]);
        // one-sided differences converge at first order
        let errs = check_jacobian_fd(&prob, &ph.c_true, &h, &[1e-2, 1e-3]).unwrap();
        assert!(errs[1] < errs[0] / 5.0);
    }
}

#[test]
fn larger_coefficient_shrinks_state() {
    let n = 8;
    let (prob, _) = pde::make_phantom(n).unwrap();
    for seed in 0..10 {
        let c = random_coefficient(n, seed);
        let bump = rng::uniform_vector(&mut rng::seeded(seed + 100), n * n, 0.0, 5.0);
        let u = pde::forward_solve(&prob, &c).unwrap();
        let u_big = pde::forward_solve(&prob, &c.add(&bump).unwrap()).unwrap();
        assert!(u_big.norm() <= u.norm());
    }
}

#[test]
fn nn_generalized_jacobian_matches_dense_oracle() {
    let data = synth_dataset(&SynthSpec {
        n_train: 300,
        n_test: 10,
        noise_pct: 0.0,
        seed: 2,
        ..SynthSpec::default()
    })
    .unwrap();
    let prob = &data.problem;
    // large weights so that some samples saturate
    let x = rng::uniform_vector(&mut rng::seeded(3), 15, -15.0, 15.0);
    let lin = prob.linearize(&x).unwrap();
    assert!(lin.slopes().iter().any(|s| *s < 1.0));
    assert!(lin.slopes().contains(&1.0));

    let act = *prob.activation();
    let mut jac = DMatrix::zeros(prob.n_train(), 15);
    for i in 0..prob.n_train() {
        let pre: f64 = prob.input(i).iter().zip(x.iter()).map(|(z, w)| z * w).sum::<f64>() + x[14];
        let s = inlm_core::nn::sigma_rderiv(&act, pre);
        for (j, z) in prob.input(i).iter().enumerate() {
            jac[(i, j)] = s * z;
        }
        jac[(i, 14)] = s;
    }
    assert!((dense_of(&lin) - &jac).norm() <= 1e-14 * jac.norm());

    let r = rng::normal_vector(&mut rng::seeded(4), prob.n_train());
    let p = NnParams::from_vector(&x).unwrap();
    let adj = inlm_core::nn::nn_adjoint_apply(prob, &p, &r).unwrap();
    assert!(rel(&to_na(&adj), &(jac.transpose() * to_na(&r))) <= 1e-12);
    assert!(check_adjoint(prob, &x, 100, 5).unwrap() <= 1e-12);
}

#[test]
fn nn_linear_region_is_locally_affine() {
    let data = synth_dataset(&SynthSpec {
        n_train: 500,
        n_test: 10,
        seed: 9,
        ..SynthSpec::default()
    })
    .unwrap();
    let x = data.truth.to_vector().unwrap();
    let lin = data.problem.linearize(&x).unwrap();
    assert!(lin.slopes().iter().all(|s| *s == 1.0));
    let h = rng::normal_vector(&mut rng::seeded(1), 15);
    let errs = check_jacobian_fd(&data.problem, &x, &h, &[1e-1, 1e-3, 1e-6]).unwrap();
    assert!(errs.iter().all(|e| *e <= 1e-9), "{errs:?}");
}
