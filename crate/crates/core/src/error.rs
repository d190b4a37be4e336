use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Hilbert dimension {0}: need n >= 2")]
    InvalidDimension(usize),

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid map specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported map: {0}")]
    UnsupportedMap(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("density matrix invalid: {0}")]
    InvalidDensity(String),

    #[error("initial state is not pure (purity {0})")]
    NotPure(f64),

    #[error("operator basis is incomplete or not orthonormal: {0}")]
    IncompleteBasis(String),

    #[error("numerical health check failed: {0}")]
    NumericalHealth(String),

    #[error("memory budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
