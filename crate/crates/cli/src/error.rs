use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Input(_) => 4,
        }
    }

    /// Bad parameters are config errors; solver trouble is numerical.
    pub fn from_model(e: p1spin::Error) -> Self {
        match e {
            p1spin::Error::InvalidInput(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }

    /// Same as `from_model`, except that invalid input blames the data file.
    pub fn from_data(e: p1spin::Error) -> Self {
        match e {
            p1spin::Error::InvalidInput(m) => CliError::Input(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
