use std::fmt;

use thiserror::Error;

/// Standing hypothesis of the existence theorem that a parameter triple can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// Growth order strictly above decay order.
    PGreaterThanQ,
    /// Diffusion exponent plus decay order strictly positive.
    MPlusQPositive,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::PGreaterThanQ => f.write_str("p>q"),
            Hypothesis::MPlusQPositive => f.write_str("m+q>0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate scale: p = q leaves the amplitude scale undefined")]
    DegenerateScale,

    #[error("unsupported parameters: hypothesis {hypothesis} fails ({detail})")]
    Unsupported { hypothesis: Hypothesis, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no admissible seed direction: {0}")]
    SeedFailure(String),

    #[error("integrator step size underflow at tau = {tau:e} (h = {step:e})")]
    StepFailure { tau: f64, step: f64 },

    #[error("trajectory never meets the X axis")]
    NoIntersection,

    #[error("inconclusive shooting: {0}")]
    Inconclusive(String),

    #[error("trajectory is not a connection: {0}")]
    NotAConnection(String),

    #[error("profile tail reaches f = {reached:e}, threshold {needed:e} required")]
    InsufficientTail { needed: f64, reached: f64 },

    #[error("blow-up guard tripped: u = {u:e} at x = {x}")]
    StabilityViolation { x: f64, u: f64 },

    #[error("negative density u = {u:e} at x = {x}")]
    Negativity { x: f64, u: f64 },

    #[error("front within {cells} cells of the boundary; domain should span at least [{suggested_min}, {suggested_max}]")]
    DomainTooSmall {
        cells: usize,
        suggested_min: f64,
        suggested_max: f64,
    },

    #[error("no front: {0}")]
    NoFront(String),
}

pub type Result<T> = std::result::Result<T, Error>;
