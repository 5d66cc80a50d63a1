use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {len} points")]
    Index { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("ball with center {center} is not contained in the enclosing ball")]
    Containment { center: usize },

    #[error("unsupported space: {0}")]
    UnsupportedSpec(String),

    #[error("empty evaluation window: {0}")]
    Window(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("missing distances: {0}")]
    Coverage(String),

    #[error("invalid metric: {0}")]
    Metric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal a violated theorem hypothesis rather than bad input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::Hypothesis(_) | Error::Window(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
