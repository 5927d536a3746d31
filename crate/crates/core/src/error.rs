use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QndError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too narrow: {0}")]
    GridTooNarrow(String),

    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error(
        "degenerate phase {phi}: require phi in (0, pi/2) with sin(phi) > 1e-6 and cos(phi) > 1e-6"
    )]
    DegeneratePhase { phi: f64 },

    #[error("null outcome: p(x0={x0}) = {density:e} is below the conditioning threshold 1e-12")]
    NullOutcome { x0: f64, density: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("sample count must be at least 1")]
    ZeroCount,

    #[error("resource limit: {n} grid points exceeds the cap of {cap}")]
    ResourceLimit { n: usize, cap: usize },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("objective is not finite at x = {x}")]
    NonFiniteObjective { x: f64 },

    #[error("no sign change of F - G on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("tuned phase {phi} is outside the usable range (0, pi/2)")]
    PhaseOutOfRange { phi: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<QndError>,
    },
}

pub type Result<T> = std::result::Result<T, QndError>;

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(QndError::NonPositive { what, value })
    }
}
