use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not convex: {0}")]
    NotConvex(String),
    #[error("{what} out of range at {at:e}; attainable bracket [{lo:e}, {hi:e}]")]
    OutOfRange {
        what: String,
        at: f64,
        lo: f64,
        hi: f64,
    },
    #[error("sublevel set at level {level:e} reaches the bound box; enlarge half-width to at least {suggested:e}")]
    BoxTooSmall { level: f64, suggested: f64 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("step {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid_input",
            Error::NotConvex(_) => "not_convex",
            Error::OutOfRange { .. } => "out_of_range",
            Error::BoxTooSmall { .. } => "box_too_small",
            Error::Inconclusive(_) => "inconclusive",
            Error::Refused(_) => "refused",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Divergent(_) => "divergent",
            Error::AtIndex { .. } => "indexed",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
