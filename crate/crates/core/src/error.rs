use thiserror::Error;

/// Errors raised by the numerical engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (|a - a*| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not normal (|a*a - aa*| = {deviation:e})")]
    NotNormal { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("ball of radius {radius} exceeds the cap of {cap} elements")]
    CapExceeded { radius: usize, cap: usize },

    #[error("element {0} lies outside the enumerated radius")]
    OutsideRadius(String),

    #[error("elements belong to different groups")]
    GroupMismatch,

    #[error("operation `{op}` is not supported for {carrier}")]
    Unsupported { op: &'static str, carrier: String },

    #[error("element is not self-adjoint (deviation {deviation:e})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("tolerance {tol:e} is not achievable within resource caps")]
    ToleranceUnachievable { tol: f64 },

    #[error("hypothesis ({which}) violated at n = {n}, m = {m}: {lhs:e} > {rhs:e}")]
    HypothesisViolation {
        which: &'static str,
        n: usize,
        m: usize,
        lhs: f64,
        rhs: f64,
    },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
