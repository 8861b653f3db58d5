use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },

    #[error("nodes {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("expected distinct nodes, got {0:?}")]
    NotDistinct(Vec<usize>),

    #[error("node-count mismatch: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("directed cycle through node {0}")]
    Cycle(usize),

    #[error("invalid node partition: {0}")]
    Partition(String),

    #[error("node {0} is not observed")]
    NotObserved(usize),

    #[error("invalid CI query: {0}")]
    InvalidQuery(String),

    #[error("degenerate covariance for ({0}, {1}) given the conditioning set")]
    DegenerateCovariance(usize, usize),

    #[error("no separating set recorded for non-adjacent pair ({0}, {1})")]
    MissingSepset(usize, usize),

    #[error("orientation conflict on edge ({from}, {to}): mark {existing:?} cannot become {wanted:?}")]
    OrientationConflict {
        from: usize,
        to: usize,
        existing: crate::graph::EdgeMark,
        wanted: crate::graph::EdgeMark,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty sample")]
    EmptySample,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{0}")]
    Results(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv { path: path.into(), source }
    }
}
