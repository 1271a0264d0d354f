use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("core error: {0}")]
    Core(#[from] cmlab_core::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing config section: {0}")]
    MissingSection(&'static str),
    #[error("no run record at {0}; run `cmlab sweep` first")]
    MissingRecord(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
