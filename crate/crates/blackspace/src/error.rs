use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] blackspace_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("no scenario named `{0}`")]
    UnknownScenario(String),
    #[error("nothing to report")]
    EmptyReport,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the failure is an overloaded queue rather than bad input.
    pub fn is_instability(&self) -> bool {
        matches!(self, Error::Model(blackspace_core::Error::Unstable { .. }))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
