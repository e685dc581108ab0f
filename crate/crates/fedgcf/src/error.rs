use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line of a dataset file could not be parsed.
    #[error("{}:{line}: {message}", file.display())]
    Format { file: PathBuf, line: usize, message: String },

    /// Dataset files parse but disagree with each other.
    #[error("dataset integrity: {0}")]
    Integrity(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fedgcf_core::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
