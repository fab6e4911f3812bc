use thiserror::Error;

/// Errors shared by all numerical layers of the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An evaluation point fell outside the sampled/tabulated range.
    #[error("range error: {0}")]
    Range(String),

    /// Root bracketing failed: no sign change on the given interval.
    #[error("bracket error: no sign change of {what} on [{lo}, {hi}]")]
    Bracket { what: String, lo: f64, hi: f64 },

    /// Adaptive quadrature ran out of budget before reaching the tolerance.
    #[error("quadrature failure: error estimate {estimate:.3e} above tolerance {tol:.3e}")]
    QuadratureFailure { estimate: f64, tol: f64 },

    /// Input data violates a structural precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Inconsistent derived quantities (signs, orderings) in a construction.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// The transition-interval scan found no admissible interval.
    #[error("selection failure: {0}")]
    SelectionFailure(String),

    /// A grid is missing required nodes.
    #[error("grid error: {0}")]
    Grid(String),

    /// Scalar curvature bound violated at a grid node.
    #[error("curvature violation at rho={rho}: margin {margin:.3e}")]
    CurvatureViolation { rho: f64, margin: f64 },

    /// A conformal factor must be positive.
    #[error("invalid conformal factor: f={value} at rho={rho}")]
    InvalidConformalFactor { rho: f64, value: f64 },

    /// Nonlinear iteration stagnated; carries the residual history.
    #[error("convergence failure after {iterations} iterations, residual {residual:.3e}")]
    Convergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    /// The sub/supersolution sandwich broke during iteration.
    #[error("monotonicity violation: {0}")]
    Monotonicity(String),

    /// Asymptotic matching against the model family failed.
    #[error("matching failure: deviation {deviation:.3e} above threshold {threshold:.3e}")]
    MatchingFailure { deviation: f64, threshold: f64 },

    /// Boundary-coefficient extraction was too noisy to trust.
    #[error("extraction error: {0}")]
    Extraction(String),

    /// The boundary-gauge ODE could not be integrated.
    #[error("gauge error: {0}")]
    Gauge(String),

    /// The linearization is only available around a constant base surface.
    #[error("unsupported base: {0}")]
    UnsupportedBase(String),

    /// Newton iteration for a CMC surface did not converge.
    #[error("no convergence: residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
