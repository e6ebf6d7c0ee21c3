use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix {index} is not skew-symmetric (max |Λ + Λᵀ| = {residual:e})")]
    SkewViolation { index: usize, residual: f64 },
    #[error("structure matrices are linearly dependent (rank {rank} < m = {m})")]
    DependentMatrices { rank: usize, m: usize },
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("dimension mismatch: expected (n, m) = ({n}, {m}), got ({got_n}, {got_m})")]
    DimensionMismatch {
        n: usize,
        m: usize,
        got_n: usize,
        got_m: usize,
    },
    #[error("horizontal index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("the homogeneous norm is singular at the origin")]
    OriginSingular,
    #[error("horizontal component is zero")]
    ZeroHorizontal,
    #[error("field `{field}` cannot be evaluated in {mode} mode")]
    UnsupportedMode { field: String, mode: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature tail did not converge: {0}")]
    TailNotConverged(String),
    #[error("sampler adaptation failed: acceptance {acceptance:.3} outside [0.1, 0.6]")]
    AdaptationFailed { acceptance: f64 },
    #[error("test function is non-zero ({value:e}) at a chain point with N = {norm:.4} < 1")]
    SupportViolation { norm: f64, value: f64 },
    #[error("degenerate test function: μ|f|^q = {0:e}")]
    DegenerateFunction(f64),
    #[error("constraint system is infeasible: row {row} has lhs > 0 with zero energy and mass")]
    Infeasible { row: usize },
    #[error("only {accepted} support points accepted (need at least 100)")]
    EmptySupportSample { accepted: usize },
}

impl Error {
    /// Short machine-readable reason, e.g. `SkewViolation`.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::SkewViolation { .. } => "SkewViolation",
            Error::DependentMatrices { .. } => "DependentMatrices",
            Error::BadDimension(_) => "BadDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::OriginSingular => "OriginSingular",
            Error::ZeroHorizontal => "ZeroHorizontal",
            Error::UnsupportedMode { .. } => "UnsupportedMode",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::TailNotConverged(_) => "TailNotConverged",
            Error::AdaptationFailed { .. } => "AdaptationFailed",
            Error::SupportViolation { .. } => "SupportViolation",
            Error::DegenerateFunction(_) => "DegenerateFunction",
            Error::Infeasible { .. } => "Infeasible",
            Error::EmptySupportSample { .. } => "EmptySupportSample",
        }
    }
}
