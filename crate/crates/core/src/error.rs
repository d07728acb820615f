use thiserror::Error;

/// Errors raised by region construction, the probability kernel and the
/// Monte Carlo oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("formulas disagree: {0}")]
    Consistency(String),

    #[error("rejection sampling budget exceeded: {0}")]
    RejectionBudgetExceeded(String),

    #[error("region file: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DegenerateRegion(_) | Error::InvalidRegion(_) | Error::Domain(_) | Error::Parse(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
