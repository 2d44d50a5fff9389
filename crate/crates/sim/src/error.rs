use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error: {0}")]
    Config(String),
    #[error("search failure: {0}")]
    Search(String),
    #[error(transparent)]
    Core(#[from] tbmc_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Process exit code: 2 for configuration problems, 3 for a failed
    /// search, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) | SimError::Json(_) => 2,
            SimError::Core(tbmc_core::Error::Config(_) | tbmc_core::Error::Unknown { .. }) => 2,
            SimError::Search(_) => 3,
            _ => 1,
        }
    }
}

pub type SimResult<T> = std::result::Result<T, SimError>;
