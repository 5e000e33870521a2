use flipmode::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid or unreadable configuration; `key` names the offending entry.
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    /// Zero mean field, vanishing `f`, or a layout that is not a difference.
    #[error("degenerate scenario: {0}")]
    Degenerate(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Physics errors are degenerate; everything else traces back to input.
    pub fn from_core(context: &str, err: Error) -> Self {
        match err {
            Error::ZeroMeanField | Error::Degenerate(_) | Error::NotDifference { .. } => {
                CliError::Degenerate(err.to_string())
            }
            other => CliError::config(context, other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Output(_) => 1,
            CliError::Degenerate(_) => 2,
        }
    }
}
