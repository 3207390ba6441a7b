use std::path::PathBuf;

/// Errors raised by the solver, the operators and the bundled problems.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operator is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("forward solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    ForwardSolve { residual: f64, tolerance: f64 },

    #[error("division by (near) zero at entry {index}: |u| = {value:e}")]
    DivisionBlowup { index: usize, value: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("solver trace does not carry iterates; enable `keep_iterates`")]
    MissingIterates,

    #[error("{path}: row {row}: {message}")]
    Csv { path: PathBuf, row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
