use thiserror::Error;

/// Every failure the library can report. Variants carry enough context to
/// tell the caller which input or which bound was the problem.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no path of length at most {horizon}")]
    Unreachable { horizon: usize },
    #[error("sample is empty")]
    EmptySample,
    #[error("path is not a geodesic: {0}")]
    NotGeodesic(String),
    #[error("paths do not share endpoints and length")]
    EndpointMismatch,
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("isometry is not hyperbolic")]
    NotHyperbolic,
    #[error("orbit failed the convergence test at threshold {threshold}")]
    ConvergenceCheckFailed { threshold: u64 },
    #[error("axis not found within the horizon")]
    AxisNotFoundWithinHorizon,
    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),
    #[error("no power within bounds yields a proper edge coloring")]
    ColoringDegenerate,
    #[error("inverse system maps are incompatible: {0}")]
    Incompatible(String),
    #[error("orbit computation needs vertices beyond the horizon")]
    OracleHorizonExceeded,
    #[error("handles or elements come from different instances")]
    IncompatibleInstances,
    #[error("finite quotient too large at depth {0}")]
    DepthInfeasible(usize),
    #[error("element does not move towards infinity")]
    NotTowardsInfinity,
    #[error("asymptotic test inconclusive: {0}")]
    Inconclusive(String),
    #[error("tree degree must be at least 3, got {0}")]
    ArityTooSmall(usize),
    #[error("group order must be at least 2, got {0}")]
    OrderTooSmall(u32),
    #[error("generating set is not closed under inverses")]
    NotSymmetricGenerators,
    #[error("parse error at line {line}: {reason}")]
    ParseError { line: usize, reason: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short stable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Unreachable { .. } => "Unreachable",
            Error::EmptySample => "EmptySample",
            Error::NotGeodesic(_) => "NotGeodesic",
            Error::EndpointMismatch => "EndpointMismatch",
            Error::InvalidIsometry(_) => "InvalidIsometry",
            Error::NotHyperbolic => "NotHyperbolic",
            Error::ConvergenceCheckFailed { .. } => "ConvergenceCheckFailed",
            Error::AxisNotFoundWithinHorizon => "AxisNotFoundWithinHorizon",
            Error::HorizonTooSmall(_) => "HorizonTooSmall",
            Error::ColoringDegenerate => "ColoringDegenerate",
            Error::Incompatible(_) => "Incompatible",
            Error::OracleHorizonExceeded => "OracleHorizonExceeded",
            Error::IncompatibleInstances => "IncompatibleInstances",
            Error::DepthInfeasible(_) => "DepthInfeasible",
            Error::NotTowardsInfinity => "NotTowardsInfinity",
            Error::Inconclusive(_) => "Inconclusive",
            Error::ArityTooSmall(_) => "ArityTooSmall",
            Error::OrderTooSmall(_) => "OrderTooSmall",
            Error::NotSymmetricGenerators => "NotSymmetricGenerators",
            Error::ParseError { .. } => "ParseError",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Unsupported(_) => "Unsupported",
            Error::InvalidProfile(_) => "InvalidProfile",
        }
    }
}
