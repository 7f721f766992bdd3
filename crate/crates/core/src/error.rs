use thiserror::Error;

/// Errors raised by the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("derivative order {needed} exceeds jet order {available}")]
    OrderExceeded { needed: usize, available: usize },
    #[error("fundamental tensor is not positive definite at {0}")]
    NotPositiveDefinite(String),
    #[error("degenerate frame: Gram-Schmidt pivot {0:.3e} below threshold")]
    DegenerateFrame(f64),
    #[error("structure equations inconsistent: residual {0:.3e}")]
    StructureInconsistent(f64),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("conformal factor is not basic: d(sigma)/dy = {0:.3e}")]
    BasicViolation(f64),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
