use thiserror::Error;

#[derive(Debug, Error)]
pub enum AeError {
    #[error("format error: {0}")]
    Format(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("target vaccine `{0}` does not appear in any report")]
    NoTarget(String),
    #[error("inconsistent counts for AE `{term}`: {detail}")]
    Consistency { term: String, detail: String },
    #[error("AE `{0}` has a zero total count (n_.i = 0)")]
    DegenerateAe(String),
    #[error("invalid group `{name}`: {detail}")]
    InvalidGroup { name: String, detail: String },
    #[error("odds ratio undefined (0/0)")]
    UndefinedOddsRatio,
    #[error("ROC undefined: {0}")]
    UndefinedRoc(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AeError {
    /// True for errors caused by the data itself rather than by the caller's
    /// configuration.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, AeError::Config(_))
    }
}

pub type Result<T, E = AeError> = std::result::Result<T, E>;
