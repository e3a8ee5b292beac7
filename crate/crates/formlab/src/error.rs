//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the CLI exit codes: `InvalidInput` exits with 2,
/// `Numeric` with 3. A `violated` check verdict is not an error; it is a
/// regular result that the CLI turns into exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on user-supplied data failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Expression evaluation hit a singular point.
    #[error("expression evaluation: {0}")]
    Eval(#[from] EvalError),

    /// A non-finite value appeared where finite arithmetic was expected.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Evaluation errors of the expression DSL.
///
/// These are reported, never folded into silent NaNs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,

    /// `abspow(0, s)` with `s <= 0` has no finite value.
    #[error("abspow with exponent {exponent} evaluated at 0")]
    SingularAbsPow { exponent: f64 },

    /// An arithmetic node produced a non-finite value (overflow).
    #[error("non-finite intermediate value")]
    NonFinite,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
