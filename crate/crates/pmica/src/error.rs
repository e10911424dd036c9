//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by tensor construction, estimation, fitting and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor order {order} out of supported range {min}..={max}")]
    UnsupportedOrder { order: usize, min: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("input array is not symmetric: max orbit deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { deviation: f64, tol: f64 },

    #[error("matrix is not orthogonal: ||Q'Q - I||_F = {deviation:.3e}")]
    NotOrthogonal { deviation: f64 },

    #[error("matrix is singular or near-singular (condition number above {max_cond:.1e})")]
    SingularMatrix { max_cond: f64 },

    #[error(
        "sample covariance is rank-deficient (min eigenvalue {min_eig:.3e}, max {max_eig:.3e}); \
         reduce dimension first, e.g. with pca_reduce / --pca <k>"
    )]
    RankDeficientCovariance { min_eig: f64, max_eig: f64 },

    #[error("tensor is not in the {pattern} pattern: relative residual {residual:.3e} > {tol:.3e}")]
    PatternPrecondition {
        pattern: String,
        residual: f64,
        tol: f64,
    },

    #[error(
        "genericity conditions for order {order} are unresolved (supported orders: 2..=6); \
         the defining polynomials for order >= 7 are not known in closed form"
    )]
    GenericityOrderUnsupported { order: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid source specification: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
