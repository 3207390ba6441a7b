//! Cholesky factorization of symmetric positive definite band matrices.

use crate::error::{Error, Result};

/// Lower factor `L` with `A = L Lᵀ`, stored row by row: entry `(i, i-d)` lives
/// at `data[i * (bw + 1) + d]` for `0 <= d <= bw`.
#[derive(Clone, Debug)]
pub(crate) struct BandCholesky {
    dim: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band is given by `entry(i, d) = A[i][i-d]`.
    pub(crate) fn factor(dim: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let stride = bw + 1;
        let mut data = vec![0.0; dim * stride];
        for i in 0..dim {
            let first = i.saturating_sub(bw);
            for j in first..=i {
                let mut sum = entry(i, i - j);
                let k_first = first.max(j.saturating_sub(bw));
                for k in k_first..j {
                    sum -= data[i * stride + (i - k)] * data[j * stride + (j - k)];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::NotPositiveDefinite { row: i, pivot: sum });
                    }
                    data[i * stride] = sum.sqrt();
                } else {
                    data[i * stride + (i - j)] = sum / data[j * stride];
                }
            }
        }
        Ok(Self { dim, bw, data })
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `A x = b` in place.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn solve_in_place(&self, x: &mut [f64]) {
        let stride = self.bw + 1;
        for i in 0..self.dim {
            let mut sum = x[i];
            for k in i.saturating_sub(self.bw)..i {
                sum -= self.data[i * stride + (i - k)] * x[k];
            }
            x[i] = sum / self.data[i * stride];
        }
        for i in (0..self.dim).rev() {
            let mut sum = x[i];
            for k in (i + 1)..(i + 1 + self.bw).min(self.dim) {
                sum -= self.data[k * stride + (k - i)] * x[k];
            }
            x[i] = sum / self.data[i * stride];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        // A = tridiag(-1, 2, -1), x = (1, 2, 3, 4)
        let a = |_: usize, d: usize| if d == 0 { 2.0 } else { -1.0 };
        let f = BandCholesky::factor(4, 1, a).unwrap();
        let mut b = vec![0.0, 0.0, 0.0, 5.0];
        f.solve_in_place(&mut b);
        for (got, want) in b.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let a = |_: usize, d: usize| if d == 0 { 1.0 } else { -2.0 };
        let err = BandCholesky::factor(3, 1, a).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { row: 1, .. }));
    }
}
