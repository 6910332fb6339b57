//! Crate-wide error type.
//!
//! Errors fall into two exit-code classes for the CLI: configuration errors
//! (bad input, exit code 2) and numerical failures (a solver gave up, exit
//! code 3). `Error::exit_code` encodes the split.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Domain extent is not an integer multiple of the grid spacing.
    #[error("extent {extent} is not an integer multiple of spacing {spacing}")]
    NonCommensurate { extent: f64, spacing: f64 },

    /// A point that must coincide with a lattice node does not.
    #[error("point ({x}, {z}) does not lie on the h = {h} lattice")]
    OffLattice { x: f64, z: f64, h: f64 },

    /// Slowness must be strictly positive everywhere.
    #[error("nonpositive slowness {value} at node {index}")]
    NonpositiveSlowness { index: usize, value: f64 },

    /// Phase-field coefficient escaped the [-1, 1] obstacle; the projection
    /// upstream is broken.
    #[error("phase-field value {value} at coefficient {index} is outside [-1, 1]")]
    OutOfObstacle { index: usize, value: f64 },

    /// A name (truth geometry, experiment, wall, study axis) was not recognized.
    #[error("unknown {kind} \"{name}\"")]
    UnknownName { kind: &'static str, name: String },

    /// Configuration validation failure; the message names the offending field.
    #[error("config error: {0}")]
    Config(String),

    /// Observations do not match the inversion grid/experiment.
    #[error("observations incompatible with config: {0}")]
    Incompatible(String),

    /// An iterative solver (conjugate gradients, fixed-point sweeps) failed
    /// to reach its tolerance within the iteration cap.
    #[error("{solver} failed to converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { solver: &'static str, iterations: usize, residual: f64 },

    /// The adjoint sweep hit a node whose upwind coefficient vanished;
    /// the forward solution it came from is corrupt.
    #[error("zero upwind diagonal in adjoint sweep at node {index}")]
    ZeroAdjointDiagonal { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// I/O failure with the path that caused it.
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attaches a path to a raw I/O error.
    pub fn file(path: &std::path::Path, source: std::io::Error) -> Error {
        Error::File { path: path.display().to_string(), source }
    }

    /// CLI process exit code: 2 for configuration problems, 3 for numerical
    /// failures (I/O and JSON problems count as configuration).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonCommensurate { .. }
            | Error::OffLattice { .. }
            | Error::UnknownName { .. }
            | Error::Config(_)
            | Error::Incompatible(_)
            | Error::Io(_)
            | Error::File { .. }
            | Error::Json(_) => 2,
            Error::NonpositiveSlowness { .. }
            | Error::OutOfObstacle { .. }
            | Error::NoConvergence { .. }
            | Error::ZeroAdjointDiagonal { .. } => 3,
        }
    }
}
