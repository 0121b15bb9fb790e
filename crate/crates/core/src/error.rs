use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Cluster index is zero-based; the message reports it one-based.
    #[error("cluster {} has no model points: no model input is nearest to physical input x = {x}", .cluster + 1)]
    EmptyCluster { cluster: usize, x: f64 },

    #[error("covariance matrix is not positive definite after jitter {jitter:e} (smallest eigenvalue estimate {min_eigenvalue:e})")]
    Conditioning { jitter: f64, min_eigenvalue: f64 },

    #[error("model response is undefined at x = {x}, theta = {theta}")]
    Domain { x: f64, theta: f64 },

    #[error("enumeration of {paths} paths exceeds the cap of {cap}")]
    TooManyPaths { paths: u128, cap: u128 },

    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
