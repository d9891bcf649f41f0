use thiserror::Error;

/// Errors produced by the capacity-bound toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature stopped before reaching its tolerance.
    #[error("quadrature did not converge: estimated relative error {rel_error:e} exceeds {tolerance:e}")]
    Quadrature { rel_error: f64, tolerance: f64 },

    /// The oversampling-equivalence fit left a large residual.
    #[error("alpha fit did not converge: sup-distance {residual:.4} at alpha {alpha:.3}")]
    AlphaFit { alpha: f64, residual: f64 },

    /// A simulation request is larger than the configured limits.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
