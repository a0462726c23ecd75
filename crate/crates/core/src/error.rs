use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants map one-to-one onto the failure kinds of the individual
/// operations; the CLI translates them into exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("points {0} and {1} coincide")]
    CoincidentPoints(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("argument outside the admissible domain of the vector field: {0}")]
    Domain(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("operation requires the {expected} variant of the vector field")]
    Variant { expected: &'static str },

    #[error("evaluation at an interaction point is singular (point {0})")]
    SingularPoint(usize),

    #[error("the trace at the profile centre is undefined at t = 0; use a one-sided limit")]
    UndefinedAtZero,

    #[error("time {t} is outside the stored history [{start}, {end}]")]
    HistoryRange { t: f64, start: f64, end: f64 },

    #[error("step-halving failed to satisfy the local error heuristic at t = {t}")]
    StiffnessFailure { t: f64 },

    #[error("stencil at distance {margin} from a light cone (needs > {required})")]
    LightConeProximity { margin: f64, required: f64 },

    #[error("(t = {t}) lies outside the domain of validity for lifespan {lifespan}")]
    OutsideDomain { t: f64, lifespan: f64 },

    #[error("z = {0} lies on the branch cut (-inf, 0]")]
    BranchCut(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Jacobian is singular")]
    SingularJacobian,

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("truncation estimate {estimate:e} exceeds 10% of the total {total:e}")]
    TruncationTooLarge { estimate: f64, total: f64 },

    #[error("analysis requires a single interaction point")]
    NotScalar,

    #[error("analysis requires real-valued data and vector field")]
    NotReal,

    #[error("integrand changes sign on the integration path near s = {0}")]
    SignChange(f64),

    #[error("insufficient samples for the asymptote fit: {got} (need {needed})")]
    InsufficientSamples { got: usize, needed: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
