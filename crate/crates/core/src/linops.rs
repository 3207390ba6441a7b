//! Dense vectors, the forward-model interface and derivative consistency checks.
//!
//! All spaces are finite-dimensional real coordinate spaces with the
//! Euclidean inner product. Forward models expose their linearization
//! matrix-free: the solver only ever asks for `A h` and `A* r`.

use std::ops::Index;

use crate::error::{check_dim, Error, Result};
use crate::rng;

/// A finite real vector with fixed dimension.
///
/// Every constructor and arithmetic helper rejects NaN and infinite entries,
/// so a `Vector` value never holds one.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("vector entry {i}")));
        }
        Ok(Self(data))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn inner(&self, other: &Vector) -> Result<f64> {
        inner(self, other)
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    /// `self + other`
    pub fn add(&self, other: &Vector) -> Result<Vector> {
        self.zip_map("vector add", other, |a, b| a + b)
    }

    /// `self - other`
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.zip_map("vector sub", other, |a, b| a - b)
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Vector) -> Result<Vector> {
        self.zip_map("hadamard product", other, |a, b| a * b)
    }

    pub fn scaled(&self, factor: f64) -> Result<Vector> {
        Vector::new(self.0.iter().map(|v| factor * v).collect())
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Vector) -> Result<()> {
        check_dim("axpy", self.len(), x.len())?;
        for (s, xi) in self.0.iter_mut().zip(&x.0) {
            *s += a * xi;
        }
        self.ensure_finite("axpy")
    }

    pub fn distance(&self, other: &Vector) -> Result<f64> {
        check_dim("distance", self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    fn zip_map(&self, context: &'static str, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Result<Vector> {
        check_dim(context, self.len(), other.len())?;
        let out = Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect());
        out.ensure_finite(context)?;
        Ok(out)
    }

    fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.0.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(context.to_string()))
        }
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(data: Vec<f64>) -> Result<Self> {
        Vector::new(data)
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Euclidean inner product, summed sequentially in index order.
pub fn inner(u: &Vector, v: &Vector) -> Result<f64> {
    check_dim("inner product", u.len(), v.len())?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

pub fn norm(u: &Vector) -> f64 {
    u.norm_sq().sqrt()
}

/// A bounded linear map between coordinate spaces, known through its action
/// and the action of its adjoint.
pub trait LinearOperator {
    fn domain_dim(&self) -> usize;
    fn range_dim(&self) -> usize;
    fn apply(&self, h: &Vector) -> Result<Vector>;
    fn apply_adjoint(&self, r: &Vector) -> Result<Vector>;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn range_dim(&self) -> usize {
        (**self).range_dim()
    }
    fn apply(&self, h: &Vector) -> Result<Vector> {
        (**self).apply(h)
    }
    fn apply_adjoint(&self, r: &Vector) -> Result<Vector> {
        (**self).apply_adjoint(r)
    }
}

/// A nonlinear operator `F: X -> Y` together with its (generalized) derivative.
///
/// `linearize(x)` captures whatever state is needed to apply `F'(x)` and
/// `F'(x)*` repeatedly, e.g. a factorization or cached forward solution.
pub trait ForwardModel {
    type Linearization<'a>: LinearOperator
    where
        Self: 'a;

    fn domain_dim(&self) -> usize;
    fn range_dim(&self) -> usize;
    fn apply(&self, x: &Vector) -> Result<Vector>;
    fn linearize(&self, x: &Vector) -> Result<Self::Linearization<'_>>;

    /// `F(x)` and the linearization at `x`. Models that share work between
    /// the two override this.
    fn evaluate(&self, x: &Vector) -> Result<(Vector, Self::Linearization<'_>)> {
        Ok((self.apply(x)?, self.linearize(x)?))
    }

    fn jacobian_apply(&self, x: &Vector, h: &Vector) -> Result<Vector> {
        self.linearize(x)?.apply(h)
    }

    fn adjoint_apply(&self, x: &Vector, r: &Vector) -> Result<Vector> {
        self.linearize(x)?.apply_adjoint(r)
    }
}

/// Row-major dense matrix acting as a linear operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseOperator {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("matrix dimensions must be positive".into()));
        }
        check_dim("dense matrix data", rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

impl LinearOperator for DenseOperator {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn range_dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, h: &Vector) -> Result<Vector> {
        check_dim("dense apply", self.cols, h.len())?;
        Vector::new(
            self.data
                .chunks_exact(self.cols)
                .map(|row| row.iter().zip(h.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    fn apply_adjoint(&self, r: &Vector) -> Result<Vector> {
        check_dim("dense adjoint", self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        for (row, ri) in self.data.chunks_exact(self.cols).zip(r.iter()) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * ri;
            }
        }
        Vector::new(out)
    }
}

/// `F(x) = M x + b`: exact linearization, explicit transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineModel {
    matrix: DenseOperator,
    offset: Vector,
}

impl AffineModel {
    pub fn linear(matrix: DenseOperator) -> Self {
        let offset = Vector::zeros(matrix.rows());
        Self { matrix, offset }
    }

    pub fn new(matrix: DenseOperator, offset: Vector) -> Result<Self> {
        check_dim("affine offset", matrix.rows(), offset.len())?;
        Ok(Self { matrix, offset })
    }

    /// The one-dimensional model `F(x) = slope * x`.
    pub fn scalar(slope: f64) -> Result<Self> {
        Ok(Self::linear(DenseOperator::new(1, 1, vec![slope])?))
    }

    pub fn matrix(&self) -> &DenseOperator {
        &self.matrix
    }
}

impl ForwardModel for AffineModel {
    type Linearization<'a> = &'a DenseOperator;

    fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    fn range_dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        self.matrix.apply(x)?.add(&self.offset)
    }

    fn linearize(&self, x: &Vector) -> Result<&DenseOperator> {
        check_dim("affine linearization point", self.matrix.cols(), x.len())?;
        Ok(&self.matrix)
    }
}

/// Largest relative violation of `<F'(x)h, r> = <h, F'(x)* r>` over random
/// standard-normal probes `h`, `r`.
pub fn check_adjoint<M: ForwardModel + ?Sized>(model: &M, x: &Vector, trials: usize, seed: u64) -> Result<f64> {
    check_dim("adjoint check point", model.domain_dim(), x.len())?;
    let lin = model.linearize(x)?;
    let mut rng = rng::seeded(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let h = rng::normal_vector(&mut rng, model.domain_dim());
        let r = rng::normal_vector(&mut rng, model.range_dim());
        let ah = lin.apply(&h)?;
        let atr = lin.apply_adjoint(&r)?;
        let lhs = inner(&ah, &r)?;
        let rhs = inner(&h, &atr)?;
        let ratio = (lhs - rhs).abs() / (ah.norm() * r.norm() + f64::EPSILON);
        if !ratio.is_finite() {
            return Err(Error::NonFinite("adjoint check".into()));
        }
        worst = worst.max(ratio);
    }
    Ok(worst)
}

/// Relative errors `|(F(x+th) - F(x))/t - F'(x)h| / |F'(x)h|`, one per step `t`.
///
/// Falls back to the absolute error when `F'(x)h = 0`.
pub fn check_jacobian_fd<M: ForwardModel + ?Sized>(
    model: &M,
    x: &Vector,
    h: &Vector,
    steps: &[f64],
) -> Result<Vec<f64>> {
    check_dim("fd check point", model.domain_dim(), x.len())?;
    check_dim("fd direction", model.domain_dim(), h.len())?;
    let (fx, lin) = model.evaluate(x)?;
    let jh = lin.apply(h)?;
    let scale = jh.norm();
    steps
        .iter()
        .map(|&t| {
            let mut xt = x.clone();
            xt.axpy(t, h)?;
            let fd = model.apply(&xt)?.sub(&fx)?.scaled(1.0 / t)?;
            let err = fd.distance(&jh)?;
            Ok(if scale > 0.0 { err / scale } else { err })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(data: &[f64]) -> Vector {
        Vector::new(data.to_vec()).unwrap()
    }

    /// Neumaier-compensated dot product.
    fn compensated_dot(u: &[f64], w: &[f64]) -> f64 {
        let mut sum = 0.0_f64;
        let mut comp = 0.0_f64;
        for (a, b) in u.iter().zip(w) {
            let term = a * b;
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    #[test]
    fn inner_basic_values() {
        assert_eq!(inner(&Vector::zeros(3), &v(&[1.0, -2.0, 5.0])).unwrap(), 0.0);
        assert_eq!(inner(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
    }

    #[test]
    fn inner_rejects_dimension_mismatch() {
        let err = inner(&v(&[1.0, 2.0]), &v(&[1.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn inner_matches_compensated_oracle() {
        let mut rng = rng::seeded(11);
        for len in [1, 7, 100, 1000, 5000] {
            let u = rng::normal_vector(&mut rng, len);
            let w = rng::normal_vector(&mut rng, len);
            let oracle = compensated_dot(u.as_slice(), w.as_slice());
            let got = inner(&u, &w).unwrap();
            assert!((got - oracle).abs() <= 1e-12 * u.norm() * w.norm());
        }
    }

    #[test]
    fn norm_values() {
        assert_eq!(norm(&Vector::zeros(4)), 0.0);
        assert_eq!(norm(&v(&[3.0, 4.0])), 5.0);
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        let big = v(&[f64::MAX]);
        assert!(big.add(&big).is_err());
        assert!(big.scaled(10.0).is_err());
    }

    #[test]
    fn dense_adjoint_is_transpose() {
        let m = DenseOperator::new(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.apply(&v(&[1.0, 0.0, -1.0])).unwrap(), v(&[-2.0, -2.0]));
        assert_eq!(m.apply_adjoint(&v(&[1.0, 1.0])).unwrap(), v(&[5.0, 7.0, 9.0]));
    }

    #[test]
    fn linear_model_adjoint_check_is_exact() {
        let mut rng = rng::seeded(5);
        let data = rng::normal_vector(&mut rng, 6 * 4).into_vec();
        let model = AffineModel::linear(DenseOperator::new(6, 4, data).unwrap());
        let x = rng::normal_vector(&mut rng, 4);
        assert!(check_adjoint(&model, &x, 100, 1).unwrap() <= 1e-12);
    }

    #[test]
    fn affine_model_fd_is_exact() {
        let mut rng = rng::seeded(6);
        let data = rng::normal_vector(&mut rng, 5 * 5).into_vec();
        let offset = rng::normal_vector(&mut rng, 5);
        let model = AffineModel::new(DenseOperator::new(5, 5, data).unwrap(), offset).unwrap();
        let x = rng::normal_vector(&mut rng, 5);
        let h = rng::normal_vector(&mut rng, 5);
        for err in check_jacobian_fd(&model, &x, &h, &[1.0, 1e-1, 1e-2, 1e-4]).unwrap() {
            assert!(err <= 1e-10, "fd error {err}");
        }
    }

    #[test]
    fn affine_model_rejects_wrong_point_dimension() {
        let model = AffineModel::scalar(2.0).unwrap();
        assert!(model.apply(&v(&[1.0, 2.0])).is_err());
        assert!(model.linearize(&v(&[1.0, 2.0])).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn finite_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-1e3..1e3f64, len)
        }

        proptest! {
            #[test]
            fn norm_is_homogeneous(data in finite_vec(8), lambda in -1e3..1e3f64) {
                let u = Vector::new(data).unwrap();
                let lhs = u.scaled(lambda).unwrap().norm();
                let rhs = lambda.abs() * u.norm();
                prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(f64::MIN_POSITIVE) * 4.0);
            }

            #[test]
            fn jacobian_is_linear_in_direction(
                m in finite_vec(12), h1 in finite_vec(4), h2 in finite_vec(4),
                a in -10.0..10.0f64, b in -10.0..10.0f64,
            ) {
                let model = AffineModel::linear(DenseOperator::new(3, 4, m).unwrap());
                let x = Vector::zeros(4);
                let h1 = Vector::new(h1).unwrap();
                let h2 = Vector::new(h2).unwrap();
                let mut comb = h1.scaled(a).unwrap();
                comb.axpy(b, &h2).unwrap();
                let lhs = model.jacobian_apply(&x, &comb).unwrap();
                let mut rhs = model.jacobian_apply(&x, &h1).unwrap().scaled(a).unwrap();
                rhs.axpy(b, &model.jacobian_apply(&x, &h2).unwrap()).unwrap();
                let frob = model.matrix().data.iter().map(|v| v * v).sum::<f64>().sqrt();
                let scale = frob * (a.abs() * h1.norm() + b.abs() * h2.norm()) + 1.0;
                prop_assert!(lhs.distance(&rhs).unwrap() <= 1e-12 * scale);
            }
        }
    }
}
