use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("interval is empty (null or spacelike endpoints)")]
    EmptyInterval,

    #[error("budget exceeded for {what}: need {needed}, limit {limit}{}", hint.as_deref().map(|h| format!("; {h}")).unwrap_or_default())]
    Budget {
        what: &'static str,
        needed: f64,
        limit: f64,
        hint: Option<String>,
    },

    #[error("causal-distance axiom {axiom} violated at {indices:?}: {detail}")]
    Axiom {
        axiom: u8,
        indices: Vec<usize>,
        detail: String,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
