use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid {name}: {reason}")]
    Validation { name: &'static str, reason: String },

    /// A linear solve met a zero pivot.
    #[error("singular system: zero pivot at row {row}")]
    Singular { row: usize },

    /// A node produced NaN or infinity.
    #[error("non-finite value at node {node} (iteration {iteration})")]
    NonFinite { node: usize, iteration: usize },

    /// The diffusion coefficient vanished or went negative where it must be positive.
    #[error("degenerate diffusion: {0}")]
    DegenerateDiffusion(String),

    /// Two fields or grids that must agree do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Adaptive quadrature hit its refinement limit.
    #[error("quadrature failed to reach tolerance (estimate {estimate:e})")]
    Quadrature { estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(name: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Validation {
        name,
        reason: reason.into(),
    })
}
