use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violated its documented constraint. The message names the
    /// parameter and the constraint, e.g. `alpha: must lie in [0, 1] (got 1.5)`.
    #[error("{name}: {message}")]
    Param { name: String, message: String },

    /// An operation received an empty input where at least one element is required.
    #[error("empty input: {0}")]
    Empty(&'static str),

    /// The likelihood is degenerate (too few observations or zero variance).
    #[error("degenerate likelihood: {0}")]
    DegenerateLikelihood(String),

    /// Configuration text failed to parse or validate.
    #[error("config: {0}")]
    Config(String),

    /// A history file row could not be parsed.
    #[error("history line {line}: {message}")]
    History { line: usize, message: String },

    /// I/O failure, annotated with the path involved.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn param(name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Param {
            name: name.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
