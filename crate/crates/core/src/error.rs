use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The variants are grouped by what a caller can do about them: fix the
/// input, raise the working precision, or accept that a mathematical
/// hypothesis of the computation does not hold for this input.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed polynomial or option text.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input outside the domain of an operation (zero polynomial, excluded
    /// parameter, non-prime modulus, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input of the wrong shape, e.g. not quadratic in `t2`.
    #[error("shape error: {0}")]
    Shape(String),

    /// A named hypothesis required by the construction is violated.
    #[error("hypothesis violated ({name}): {detail}")]
    Hypothesis { name: String, detail: String },

    /// The working precision is too small to certify the result.
    #[error("precision exhausted: {0}; raise the working precision")]
    PrecisionExhausted(String),

    /// The curve meets the torus in a one-dimensional set, so a pointwise
    /// answer does not exist.
    #[error("curve meets the torus in a 1-dimensional set")]
    OneDimensional,

    /// Internal consistency check failed (branch swap, route disagreement).
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn hypothesis(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name: name.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Domain(_) | Error::Shape(_) => 1,
            Error::PrecisionExhausted(_) | Error::Consistency(_) => 2,
            Error::Hypothesis { .. } | Error::OneDimensional => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
