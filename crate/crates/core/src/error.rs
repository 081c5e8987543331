use thiserror::Error;

/// Errors raised by state construction, special functions and the analyses
/// built on top of them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseLabError {
    #[error("index {index} out of range for truncation {n_trunc}")]
    Index { index: usize, n_trunc: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("series did not converge within {max_terms} terms ({what})")]
    NonConvergence { what: &'static str, max_terms: usize },

    #[error("truncation too small: tail mass {tail_mass:e} exceeds {limit:e}")]
    Truncation { tail_mass: f64, limit: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid state file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, PhaseLabError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(PhaseLabError::Domain(msg.into()))
}
