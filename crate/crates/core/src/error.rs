use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid wave packet: {0}")]
    InvalidPacket(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot fold a complex phase point onto the torus")]
    FoldComplex,

    #[error("runaway trajectory at step {step}: |Im| = {magnitude:.3e} exceeds {bound}")]
    Runaway { step: usize, magnitude: f64, bound: f64 },

    #[error("fixed point ({p}, {q}) is not hyperbolic (trace {trace})")]
    NotHyperbolic { p: f64, q: f64, trace: f64 },

    #[error("({p}, {q}) is not a fixed point of the map (displacement {displacement:.3e})")]
    NotFixedPoint { p: f64, q: f64, displacement: f64 },

    #[error("manifold refinement exceeded {cap} points")]
    RefinementCap { cap: usize },

    #[error("singular Newton system (near-coalescing saddles or caustic)")]
    SingularSystem,

    #[error("caustic: vanishing determinant in {0}")]
    Caustic(String),

    #[error("Newton search did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid experiment configuration: {0}")]
    Config(String),

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

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
