use std::path::PathBuf;

/// Errors produced by the classifier, its file formats and the evaluation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Vectors or matrices whose shapes do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input that is well-shaped but mathematically unusable (e.g. a zero vector
    /// where a direction is required).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An operation was invoked on an object in the wrong state (empty model,
    /// untrained class, index out of range, ...).
    #[error("state error: {0}")]
    State(String),

    /// A file that does not follow its declared layout.
    #[error("format error: {0}")]
    Format(String),

    /// Structurally valid data with invalid contents (non-finite values,
    /// unknown class indices, classes too small to split).
    #[error("data error: {0}")]
    Data(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, actual: usize, what: &str) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension(format!(
            "{what}: expected dimension {expected}, got {actual}"
        )));
    }
    Ok(())
}
