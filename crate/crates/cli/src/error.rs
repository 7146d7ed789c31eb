use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.as_ref().map_or("config".into(), |p| p.display().to_string()))]
    Json {
        path: Option<PathBuf>,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A library error tied to an input file.
    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: ultraspec::Error,
    },
    #[error(transparent)]
    Core(#[from] ultraspec::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
