use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinates must be finite")]
    NonFinite,

    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),

    /// The symmetric part of an affine operator has a negative eigenvalue
    /// below the construction floor.
    #[error("operator is not monotone: smallest eigenvalue of the symmetric part is {0:e}")]
    NotMonotone(f64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is not maximal: value {0} is not covered by x + gamma*y")]
    NotMaximal(f64),

    #[error("the value set is empty at the given point")]
    EmptyValue,

    #[error("the domains have empty intersection")]
    EmptyDomain,

    #[error("invalid weights: {0}")]
    WeightError(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no closed-form mean operator is available for this model")]
    Unavailable,

    #[error("the point is not a zero of the mean operator (residual {0:e})")]
    NotAZero(f64),

    #[error("this operator has no handle representation")]
    Unrepresentable,

    #[error("invalid parameter law: {0}")]
    InvalidLaw(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_step(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidStep(gamma))
    }
}
