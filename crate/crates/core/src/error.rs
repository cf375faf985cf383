use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeomError {
    #[error("support function is unbounded in the requested direction")]
    UnboundedBody,
    #[error("origin is not an interior point of the body (inner radius {radius:e})")]
    OriginNotInterior { radius: f64 },
    #[error("dimension too large: {0}")]
    DimensionTooLarge(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("body is not in John position (residual {residual:e})")]
    NotInJohnPosition { residual: f64 },
    #[error("body is not in Loewner position (residual {residual:e})")]
    NotInLoewnerPosition { residual: f64 },
    #[error("representation unavailable: {0}")]
    RepresentationUnavailable(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("argument outside the function domain: {0}")]
    DomainError(String),
    #[error("containment violated by {violation:e}")]
    ContainmentViolated { violation: f64 },
    #[error("wrong dimension: expected {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("random body generation failed after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("infeasible linear program")]
    Infeasible,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
