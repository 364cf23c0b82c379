use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("evaluation point {0} is within the pole guard")]
    PoleProximity(String),
    #[error("denominator underflow at {0}")]
    DivisionUnderflow(String),
    #[error("leading Laurent order is ambiguous at {0}")]
    JetAmbiguous(String),
    #[error("contour radius too small at {0}")]
    RadiusTooSmall(String),
    #[error("value {value} is not within {tol} of an integer")]
    NotNearInteger { value: f64, tol: f64 },
    #[error("data failed validation: {0}")]
    NotValidated(String),
    #[error("dual data is degenerate: {0}")]
    DegenerateDual(String),
    #[error("path passes through a singularity: {0}")]
    PathThroughSingularity(String),
    #[error("no admissible path: {0}")]
    PathBlocked(String),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("unsupported end type: {0}")]
    UnsupportedType(String),
    #[error("surface evaluation failed: {0}")]
    EvaluationFailure(String),
    #[error("Whitney determinant {ratio:e} is between thresholds at step {h:e}")]
    IndeterminateScale { ratio: f64, h: f64 },
    #[error("Gauss map is constant")]
    ConstantGauss,
    #[error("degree is uncertain: {0}")]
    DegreeUncertain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
