use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid mass assignment: {0}")]
    InvalidMass(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The pointwise product of two densities has (numerically) no mass.
    #[error("degenerate fusion: product of densities integrates to {0:e}")]
    DegenerateFusion(f64),

    /// A candidate pair (or tuple) carries zero total weight and cannot be
    /// sampled from; callers are expected to redraw.
    #[error("unsampleable candidates: all selection weights are zero")]
    Unsampleable,

    #[error("sampling aborted after {attempts} redraws of zero-weight candidates")]
    RedrawLimit { attempts: usize },

    #[error("target coincides with sensor at ({x}, {y})")]
    CoincidentTarget { x: f64, y: f64 },

    /// All particle weights underflowed to zero.
    #[error("filter divergence: all particle weights vanished")]
    Divergence,

    #[error("config error at key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
