use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: expected `<user-id> <item-id>`, got {content:?}")]
    Parse { line: usize, content: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("numerical failure at vertex {vertex} in iteration {iteration}: smallest pivot {pivot:e}")]
    Numerical {
        vertex: usize,
        iteration: usize,
        pivot: f64,
    },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error("bad model file: {0}")]
    ModelFormat(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
