use std::fmt::Display;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {key}: {message}")]
    Config { key: String, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{stage} failed: {source}")]
    Solver {
        stage: String,
        #[source]
        source: toboggan::Error,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Display) -> Self {
        Self::Config {
            key: key.into(),
            message: message.to_string(),
        }
    }

    pub fn solver(stage: impl Into<String>) -> impl FnOnce(toboggan::Error) -> Self {
        let stage = stage.into();
        move |source| Self::Solver { stage, source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } | Self::Io { .. } => 2,
            Self::Solver { .. } => 3,
        }
    }
}
