use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] eigenfilter::Error),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn output(msg: impl Into<String>) -> Self {
        CliError::Output(msg.into())
    }

    /// The message without the category prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Output(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
