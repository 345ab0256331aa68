use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial degree {0} exceeds the cap of 64")]
    DegreeCap(u32),
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("covariance is singular (smallest eigenvalue {min:e}, largest {max:e})")]
    Singular { min: f64, max: f64 },
    #[error("scale parameters must be positive")]
    NonPositiveScale,
    #[error("value is irrational in exact mode: {0}")]
    Irrational(&'static str),
    #[error("series has order-0 coefficient that cannot be inverted")]
    SeriesNotInvertible,
    #[error("series exponential needs a zero order-0 coefficient")]
    SeriesNotNilpotent,
    #[error("need cumulants up to order {needed}, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("missing moment for multi-index {0}")]
    MissingMoment(String),
    #[error("first moments must vanish")]
    NonZeroMean,
    #[error("right-hand side is not orthogonal to the Gaussian density")]
    NotOrthogonal,
    #[error("inconsistent recursion inputs at level {0}")]
    Inconsistent(usize),
    #[error("non-diagonal covariance requires numeric mode")]
    ExactNeedsDiagonal,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("sample size {n} exceeds the assignment cap {cap}")]
    SizeCap { n: usize, cap: usize },
    #[error("sample sizes differ: {0} vs {1}")]
    UnequalSizes(usize, usize),
    #[error("assignment solver produced no feasible matching")]
    Infeasible,
    #[error("measure has jumps beyond the cutoff")]
    BigJumpsPresent,
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::InvalidParameter(_)
                | Error::SizeCap { .. }
                | Error::UnequalSizes(..)
                | Error::MissingMoment(_)
                | Error::NonZeroMean
                | Error::InsufficientOrder { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
