use std::path::PathBuf;

use crate::space::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input is not a finite square matrix (or a vector of the wrong length).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("matrix is not a valid quasi-metric: {}", .0.summary())]
    InvalidSpace(Box<ValidationReport>),

    #[error("quasi-metric is not weightable: perimeter residual {residual:e} at triple {triple:?}")]
    NotWeightable { triple: [usize; 3], residual: f64 },

    /// `1/2 |w(i) - w(j)| <= rho(i, j)` fails (or holds with equality in strict mode).
    #[error("Lipschitz bound violated at pair ({}, {}): half weight gap {half_gap} vs rho {rho}", .pair.0, .pair.1)]
    Lipschitz {
        pair: (usize, usize),
        half_gap: f64,
        rho: f64,
    },

    #[error("empty point subset")]
    EmptySubset,

    #[error("index {index} out of range for a space with {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("field evaluation failed at node {node} ({x}, {y}): {reason}")]
    Evaluation {
        node: usize,
        x: f64,
        y: f64,
        reason: String,
    },

    #[error("Randers structure is not positive definite: |b|_alpha = {sup} at node {node}")]
    NotPositive { sup: f64, node: usize },

    #[error("nonpositive edge weight {weight} on edge {from} -> {to}")]
    NonPositiveEdge { from: usize, to: usize, weight: f64 },

    #[error("ray from node {node} leaves the mask at t = {t}")]
    RayExitsMask { node: usize, t: f64 },

    #[error("parse error in {location}: {message}")]
    Parse { location: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
