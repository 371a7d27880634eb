use std::fmt;

/// A failed command with its process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<pcrk::Error> for CliError {
    fn from(e: pcrk::Error) -> Self {
        use pcrk::Error::*;
        let code = match e {
            Parse { .. } | UnknownMethod(_) | Io(_) => EXIT_USAGE,
            Invalid { .. } | Precondition(_) => EXIT_VALIDATION,
            Domain(_) | Pole { .. } | Overflow { .. } => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}
