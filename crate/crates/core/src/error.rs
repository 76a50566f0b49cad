use thiserror::Error;

use crate::maxent::SolverReport;

/// Errors raised by the library. Every variant has a stable name (see
/// [`Error::name`]) that the command-line front end prints verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum has no levels")]
    EmptySpectrum,

    #[error("levels must be strictly increasing: level {index} is {value} after {previous}")]
    UnsortedLevels {
        index: usize,
        previous: f64,
        value: f64,
    },

    #[error("degeneracy of level {index} must be at least 1")]
    NonPositiveDegeneracy { index: usize },

    #[error("level {index} is not finite")]
    NonFiniteLevel { index: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("scale must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("probability {index} is negative or not finite ({value})")]
    InvalidProbability { index: usize, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("every level is cut off for these parameters")]
    AllLevelsCutOff,

    #[error("exponent at level {index} is not finite")]
    NonFiniteExponent { index: usize },

    #[error("order must be at least 1")]
    ZeroOrder,

    #[error("order {0} exceeds the maximum supported order {max}", max = crate::extbg::MAX_ORDER)]
    OrderTooLarge(usize),

    #[error("multiplier {0} is not finite")]
    NonFiniteMultiplier(usize),

    #[error("leading multiplier is zero")]
    ZeroLeadingMultiplier,

    #[error("domain ratio {ratio} is not below 1; the truncated series does not converge")]
    OutsideConvergenceDomain { ratio: f64 },

    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("infeasible targets: {0}")]
    InfeasibleTargets(String),

    #[error("{levels} levels cannot identify {order} moments (need at least order + 1)")]
    TooFewLevels { levels: usize, order: usize },

    #[error(
        "solver stopped after {} iterations with residual {:e}",
        .0.iterations,
        .0.residual_norm
    )]
    NotConverged(Box<SolverReport>),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// Stable variant name.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptySpectrum => "EmptySpectrum",
            Error::UnsortedLevels { .. } => "UnsortedLevels",
            Error::NonPositiveDegeneracy { .. } => "NonPositiveDegeneracy",
            Error::NonFiniteLevel { .. } => "NonFiniteLevel",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonPositiveScale(_) => "NonPositiveScale",
            Error::InvalidProbability { .. } => "InvalidProbability",
            Error::NotNormalized(_) => "NotNormalized",
            Error::InvalidParams(_) => "InvalidParams",
            Error::AllLevelsCutOff => "AllLevelsCutOff",
            Error::NonFiniteExponent { .. } => "NonFiniteExponent",
            Error::ZeroOrder => "ZeroOrder",
            Error::OrderTooLarge(_) => "OrderTooLarge",
            Error::NonFiniteMultiplier(_) => "NonFiniteMultiplier",
            Error::ZeroLeadingMultiplier => "ZeroLeadingMultiplier",
            Error::OutsideConvergenceDomain { .. } => "OutsideConvergenceDomain",
            Error::OrderMismatch { .. } => "OrderMismatch",
            Error::InfeasibleTargets(_) => "InfeasibleTargets",
            Error::TooFewLevels { .. } => "TooFewLevels",
            Error::NotConverged(_) => "NotConverged",
            Error::Parse { .. } => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
