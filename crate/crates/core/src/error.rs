use thiserror::Error;

use crate::specfun::SpecfunError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("quadrature did not converge: estimated error {error:e} above tolerance {tol:e} after {intervals} subintervals")]
    Quadrature { error: f64, tol: f64, intervals: usize },
    #[error("no root number {m} below x = {window} for {what}")]
    RootWindow { what: String, m: usize, window: f64 },
    #[error("r = {r} lies outside [{lo}, {hi}]")]
    OutOfDomain { r: f64, lo: f64, hi: f64 },
    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures caused by numerics rather than by the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. } | Error::RootWindow { .. } | Error::Specfun(SpecfunError::NoConvergence { .. })
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
