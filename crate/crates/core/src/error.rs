use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter set that cannot describe a valid system.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input lengths or shapes that do not match what an operation expects.
    #[error("input shape error: {0}")]
    Shape(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("probability {p} outside the achievable range [{min}, {max}] of the curve")]
    OutOfRange { p: f64, min: f64, max: f64 },

    #[error("Remez exchange did not converge after {iterations} iterations (last ripple {ripple:e})")]
    Design { iterations: usize, ripple: f64 },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Strips any context layers and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
