use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Requested a transmitted ray/coefficient beyond the critical angle.
    #[error("total internal reflection: n_in*sin(theta_in)/n_out = {sin_ratio:.6} > 1")]
    TotalInternalReflection { sin_ratio: f64 },

    /// A geometry produced no usable output (e.g. zero exited rays).
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Configuration file is invalid; `path` is the JSON field path.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
