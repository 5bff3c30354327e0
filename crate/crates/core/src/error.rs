use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {value} outside [-1, 1]")]
    Domain { value: f64 },

    #[error("order m = {m} not admissible for degree {ell}")]
    Order { ell: i64, m: i64 },

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("vector is not on the unit sphere (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("quadrature rule exact to degree {available}, need {required}")]
    InsufficientQuadrature { required: usize, available: usize },

    #[error("grid cannot resolve band limit {kappa}: {reason}")]
    InsufficientGrid { kappa: usize, reason: String },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("field value {value} at ({i}, {j}) overflows the exponential")]
    Overflow { i: usize, j: usize, value: f64 },

    #[error("radius {value} at ({i}, {j}) is not positive")]
    NonPositiveRadius { i: usize, j: usize, value: f64 },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the file system rather than of the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
