use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A sequence family parameter violates the family's constraints.
    #[error("invalid {family} parameters: {constraint}")]
    InvalidParameter {
        family: &'static str,
        constraint: String,
    },

    /// Argument outside the domain of a function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// Some x_k <= 0 for k >= 1, so factorials and series are undefined.
    #[error("degenerate sequence: x_{index} = {value} is not positive")]
    DegenerateSequence { index: usize, value: f64 },

    /// A hypergeometric denominator parameter is a non-positive integer.
    #[error("denominator pole: b = {0} is a non-positive integer")]
    DenominatorPole(f64),

    /// An iterative or adaptive scheme exhausted its budget.
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    /// A truncated state or operator is too small for the requested accuracy.
    #[error("truncation at dimension {dim} is insufficient; need at least {suggested}")]
    Truncation { dim: usize, suggested: usize },

    /// A sum or integral grows instead of decaying.
    #[error("divergence in {what}: {detail}")]
    Divergence { what: &'static str, detail: String },

    /// Operation is not available for this sequence family.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The continuous extension is not monotone on the inversion bracket.
    #[error("sequence is not invertible near x = {0}")]
    NonInvertible(f64),

    /// Two computation routes that must agree did not.
    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn invalid(family: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            family,
            constraint: constraint.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical scheme (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Divergence { .. }
                | Error::Truncation { .. }
                | Error::Consistency(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
