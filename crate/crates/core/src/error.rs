use thiserror::Error;

use crate::spaces::trend::TrendCertificate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} values for level {level}, got {actual}")]
    LengthMismatch {
        level: u32,
        expected: u64,
        actual: u64,
    },
    #[error("level {level} exceeds the level cap {cap}")]
    LevelCapExceeded { level: u32, cap: u32 },
    #[error("rademacher function r_{k} is not constant on rank-{level} intervals")]
    LevelTooLow { k: u32, level: u32 },
    #[error("{what} is too large to materialize (n = {n}, limit {limit})")]
    TooLarge {
        what: &'static str,
        n: u64,
        limit: u64,
    },
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(u64),
    #[error("invalid space: {0}")]
    InvalidSpec(String),
    #[error("the Köthe dual of {0} is not supported")]
    UnsupportedDual(String),
    #[error("norm diverges under truncation (observed growth {:?})", .0.growth)]
    DivergentNorm(Box<TrendCertificate>),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("weight must be strictly positive (cell value {0})")]
    NonPositiveWeight(String),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error("too many coefficients: {n} (limit {limit})")]
    TooManyCoefficients { n: usize, limit: usize },
    #[error("condition n_k^(1/8) >= 2^(N_(k-1)) fails at block {block}: m_k = {m}, 8 N_(k-1) = {required}")]
    Condition185Violated {
        block: usize,
        m: u64,
        required: String,
    },
    #[error("block size n = {0} is below 4; the witness lower bound does not apply")]
    BlockTooSmall(u64),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Validation errors are caller mistakes; everything else is a numeric failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::DivergentNorm(_) | Error::QuadratureFailure(_) | Error::DivisionByZero(_)
        )
    }
}
