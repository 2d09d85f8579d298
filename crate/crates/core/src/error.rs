use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors across loading, validation, training, and evaluation.
///
/// Loading never silently clamps or coerces: every out-of-range or malformed
/// value surfaces as a `Parse` or `Validation` error naming the offender.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported model schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Attribute has no positives or no negatives anywhere in the validation
    /// set; no operating point can be estimated and candidate splits on it
    /// must be discarded.
    #[error("attribute {attr} is degenerate: validation set has no {missing} examples")]
    DegenerateAttribute { attr: usize, missing: &'static str },

    #[error("node has zero total mass; class distribution is undefined")]
    EmptyNode,

    #[error("training failed: {0}")]
    Growth(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
