use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid coefficient data: {0}")]
    Coefficient(String),

    #[error("raster file {path}: line {line}: {msg}")]
    RasterParse { path: PathBuf, line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("sparse solver: {0}")]
    Solver(String),

    #[error("singular matrix: no usable pivot at elimination step {pivot} of {size}")]
    SingularMatrix { pivot: usize, size: usize },

    #[error("numerically singular matrix: non-finite solution component at index {index}")]
    NumericallySingular { index: usize },

    #[error("constraint rows {rows:?} are linearly dependent")]
    RankDeficientConstraints { rows: Vec<usize> },

    #[error("corrector solve failed for coarse element {element}, local basis {local}: {source}")]
    Corrector {
        element: usize,
        local: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("reference solution has zero energy norm")]
    ZeroReferenceNorm,

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
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

    pub(crate) fn at_stage(self, stage: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.into(),
            source: Box::new(self),
        }
    }
}
