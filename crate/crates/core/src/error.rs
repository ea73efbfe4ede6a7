use serde::Serialize;
use thiserror::Error;

/// Sign of a divergent integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PositiveInfinity,
    NegativeInfinity,
}

impl Direction {
    pub fn from_sign(sign: f64) -> Self {
        if sign < 0.0 {
            Direction::NegativeInfinity
        } else {
            Direction::PositiveInfinity
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::PositiveInfinity => "+inf",
            Direction::NegativeInfinity => "-inf",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("quadrature failed to reach tolerance (estimated error {error:.3e} after {subdivisions} subdivisions)")]
    QuadratureFailure { error: f64, subdivisions: usize },

    #[error("integral diverges to {} ({detail})", direction.as_str())]
    DivergentIntegral { direction: Direction, detail: String },

    #[error("root iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("contour violation: {0}")]
    ContourViolation(String),

    #[error("neither vector majorizes the other")]
    NotComparable,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::DomainViolation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
