use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported degree {found} (at most {max} allowed)")]
    UnsupportedDegree { found: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("refused: {what} ({count} > limit {limit})")]
    Refused {
        what: String,
        count: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Verification(_) => 3,
            Error::Refused { .. } => 4,
            _ => 2,
        }
    }
}
