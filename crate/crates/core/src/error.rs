use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A header, grid or config file is missing a field or has a garbled one.
    #[error("format error in `{field}`: {message}")]
    Format { field: String, message: String },

    #[error("truncated data file {path}: expected {expected} bytes, found {actual}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error(
        "dimension mismatch: expected {expected_width}x{expected_height}, found {width}x{height}"
    )]
    Dimension {
        expected_width: usize,
        expected_height: usize,
        width: usize,
        height: usize,
    },

    #[error("ground truth has no labeled pixels")]
    NoLabeledPixels,

    #[error(
        "class {class} has {count} labeled pixel(s); at least 2 are needed for a stratified split"
    )]
    DegenerateClass { class: u32, count: usize },

    #[error("invalid synthetic spec: {0}")]
    Spec(String),

    /// A caller broke an operation's precondition (length mismatch, empty input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            field: field.into(),
            message: message.into(),
        }
    }
}
