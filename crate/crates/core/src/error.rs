use thiserror::Error;

/// Errors raised by the numerical kernels, the channel model and the trial engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("non-finite integrand value {value} at node {index} (x = {node})")]
    NonFinite { index: usize, node: f64, value: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (best estimate {best}, error estimate {abs_error})")]
    NoConvergence {
        best: f64,
        abs_error: f64,
        subdivisions: usize,
    },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid trial plan: {0}")]
    InvalidPlan(String),

    #[error("antenna index {index} out of range 0..{n_tx}")]
    IndexOutOfRange { index: usize, n_tx: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite { .. } | Error::NoConvergence { .. })
    }
}
