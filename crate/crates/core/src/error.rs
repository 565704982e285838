use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A finite-difference stencil point falls outside the open domain.
    #[error("stencil point {point:?} leaves the open domain")]
    Domain { point: Vec<f64> },
    #[error("usage error: {0}")]
    Usage(String),
    /// A named parameter violates a hypothesis of the estimate being checked.
    #[error("parameter `{name}` = {value}: requires {requirement}")]
    Precondition {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },
    #[error("metric is not symmetric at {point:?}")]
    NotSymmetric { point: Vec<f64> },
    #[error("non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn precondition(
    ok: bool,
    name: &'static str,
    value: f64,
    requirement: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition {
            name,
            value,
            requirement,
        })
    }
}
