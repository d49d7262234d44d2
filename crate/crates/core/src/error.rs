use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The series for the Abel map would need more terms than allowed.
    #[error("series ceiling exceeded: need {needed} terms, ceiling {ceiling} (Im tau = {im_tau:.3e})")]
    SeriesCeiling {
        needed: usize,
        ceiling: usize,
        im_tau: f64,
    },

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record: {0}")]
    Record(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
