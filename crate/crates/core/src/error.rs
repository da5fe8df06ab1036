use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The interference integral does not converge for this path-loss exponent.
    #[error(
        "interference diverges for path-loss exponent {exponent}: the aggregate interference \
         of an infinite planar PPP is unbounded for n <= 2; use the noise-limited evaluator \
         or Monte Carlo"
    )]
    Divergent { exponent: f64 },

    /// Adaptive quadrature hit its subdivision limit before meeting the tolerance.
    #[error("quadrature did not converge: best estimate {estimate} with error estimate {error}")]
    Quadrature { estimate: f64, error: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
