use std::fmt;

use hahn_paths::Error;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;
pub const EXIT_INTERNAL: i32 = 1;

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SamplerLimit { .. } => EXIT_RESOURCE,
            Error::BoundaryRegime(_)
            | Error::PoleOnContour(_)
            | Error::Quadrature(_)
            | Error::GaugeSingular(_)
            | Error::ZeroGauge { .. } => EXIT_BOUNDARY,
            Error::Inconsistent(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::internal(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
