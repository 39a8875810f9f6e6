//! Error type shared by all solver and assembly routines.

use thiserror::Error;

/// Failures surfaced by meshing, assembly, and the linear/eigen solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two operands have incompatible dimensions.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix expected to be symmetric positive definite is not.
    #[error("matrix not positive definite: nonpositive pivot {pivot:.6e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// A direct factorization hit an exactly zero pivot column.
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// An iterative solver exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    /// A sample file or grid table could not be interpreted.
    #[error("malformed samples: {0}")]
    MalformedSamples(String),

    /// A right-hand-side profile evaluated to a non-finite value.
    #[error("non-finite value in right-hand side profile at t = {at}")]
    NonFiniteProfile { at: f64 },

    /// Underlying I/O failure while reading sample data.
    #[error("i/o error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
