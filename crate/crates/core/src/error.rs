use thiserror::Error;

/// Errors raised by the geometry kernel and everything built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("zero material vector has no unique point")]
    ZeroMass,

    #[error("vector is not a material vector of this space (residual {residual:e})")]
    OffCone { residual: f64 },

    #[error("point is not on the space (constraint residual {residual:e})")]
    OffSpace { residual: f64 },

    #[error("no mass center: {0}")]
    NoMassCenter(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("empty input")]
    EmptyInput,

    #[error("quadrature did not converge: estimate {value:e} with error {error:e} after {evaluations} evaluations")]
    NonConvergence {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("degenerate Jacobian over the whole parameter domain")]
    DegenerateJacobian,

    #[error("no Monte Carlo sample landed inside the region")]
    ZeroAcceptance,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
