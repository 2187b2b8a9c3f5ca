use thiserror::Error;

/// Failure modes shared by every stage of the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature degree insufficient: orthonormality defect {defect:.3e} (limit {limit:.1e})")]
    QuadratureDegreeInsufficient { defect: f64, limit: f64 },

    #[error("insufficient smoothness: derivative of order {requested} requested, field provides {available}")]
    InsufficientSmoothness { requested: usize, available: usize },

    #[error("non-positive weight {value:.3e} at node {node} (x = {x:.6e})")]
    NonpositiveWeight { node: usize, x: f64, value: f64 },

    #[error("field is not in H^1_0: value {value:.3e} at endpoint x = {endpoint}")]
    NotInH10 { endpoint: f64, value: f64 },

    #[error("physical vacuum condition violated at x = {x:.6e}: {inequality} (value {value:.6e})")]
    VacuumConditionViolated { x: f64, inequality: String, value: f64 },

    #[error("flow map derivative eta_x = {eta_x:.6} left [1/2, 3/2] at t = {t:.6e}, x = {x:.6e}")]
    EtaRangeViolation { t: f64, x: f64, eta_x: f64 },

    #[error("linear solve failed (condition estimate {condition:.3e})")]
    LinearSolve { condition: f64 },

    #[error("fixed-point iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("Dirichlet condition violated: endpoint value {value:.3e}")]
    DirichletViolation { value: f64 },

    #[error("adiabatic exponent gamma = {0} out of range")]
    GammaOutOfRange(f64),

    #[error("time-derivative stack too shallow: need order {needed}, have {available}")]
    MissingDerivativeStack { needed: usize, available: usize },

    #[error("affine flow collapsed (h -> 0) near t = {t:.6e}")]
    FlowCollapse { t: f64 },

    #[error("oracle quadrature stalled: error estimate {estimate:.3e} above tolerance {tolerance:.1e}")]
    OracleNonConvergence { estimate: f64, tolerance: f64 },

    #[error("time step rejected: {0}")]
    StepFailure(String),

    #[error("config invalid: `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
