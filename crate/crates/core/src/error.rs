use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The operation is undefined for the given input (e.g. a series at a pole).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `I - zA` is singular: `z` is a pole of the stability function.
    #[error("z = {z} is a pole of the stability function")]
    Pole { z: Complex64 },

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    /// Malformed tableau file.
    #[error("parse error{}: {message}", location.as_deref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Parse {
        location: Option<String>,
        message: String,
    },

    /// A tableau invariant is violated; `invariant` names it.
    #[error("invalid tableau `{name}`: {invariant}")]
    Invalid { name: String, invariant: String },

    /// A non-finite state was produced while stepping.
    #[error("non-finite state in sweep {sweep}{}", step.map(|s| format!(" of step {s}")).unwrap_or_default())]
    Overflow { sweep: usize, step: Option<usize> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
