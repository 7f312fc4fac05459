use std::fmt;

use contact_core::Error;

/// Failure of a run, carrying its process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_IO: i32 = 1;

impl CliError {
    pub fn bad_args(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_BAD_ARGS,
            message: msg.into(),
        }
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_UNSUPPORTED,
            message: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidArgument(_) | Error::Domain(_) => EXIT_BAD_ARGS,
            Error::NoConvergence { .. } | Error::Ambiguous(_) => EXIT_NO_CONVERGENCE,
            Error::Unsupported(_) => EXIT_UNSUPPORTED,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
