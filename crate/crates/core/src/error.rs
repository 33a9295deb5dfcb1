use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("treatment probability must lie strictly inside (0, 1), got {0}")]
    InvalidProbability(f64),

    #[error("cannot place {requested} edges on {n} nodes (at most {max})")]
    InfeasibleEdgeCount { requested: u64, max: u64, n: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid clustering: {0}")]
    Clustering(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("fixed-point solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("two-hop enumeration would touch ~{estimate:e} candidate pairs, above the cap of {cap:e}")]
    CostCap { estimate: f64, cap: f64 },

    #[error("{what} of size {size} exceeds the exhaustive-enumeration cap of {cap}")]
    OracleCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{group} group has {size} units; at least 2 are needed")]
    GroupTooSmall { group: &'static str, size: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code: 1 usage, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidProbability(_) | Error::InfeasibleEdgeCount { .. } => 1,
            Error::NoConvergence { .. } | Error::CostCap { .. } | Error::NonFinite { .. } => 3,
            _ => 2,
        }
    }
}
