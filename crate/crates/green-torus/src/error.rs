use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter left its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation point fell within the pole guard of a lattice point.
    #[error("argument within pole guard of lattice point {nearest} (distance {distance:.3e})")]
    Pole { nearest: Complex64, distance: f64 },

    /// An iterative solver failed to converge.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Last iterate, flattened to a point list where applicable.
        last: Vec<Complex64>,
    },

    /// The requested case is outside what the implementation supports.
    #[error("unsupported: {0}")]
    Capability(String),

    /// A linear system that should be regular was numerically singular.
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// Monodromy data landed on the half-lattice, i.e. at a branch point.
    #[error("monodromy data ({r}, {s}) lies in (1/2)Z^2: branch point of the spectral curve")]
    BranchPoint { r: Complex64, s: Complex64 },
}

pub type Result<T> = std::result::Result<T, Error>;
