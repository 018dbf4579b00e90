use thiserror::Error;

/// Everything that can go wrong in the core algorithms.
///
/// Variants distinguish bad input (caller can fix the parameters) from
/// numerical failure (the method did not converge or the problem is outside
/// the regime the method handles).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("state has no admissible jump: {0}")]
    NoJump(String),

    #[error("jump is degenerate (end states coincide): {0}")]
    DegenerateJump(String),

    #[error("integrand is singular inside the interval: {0}")]
    SingularIntegrand(String),

    #[error("root not bracketed on [{lo}, {hi}] for {what}")]
    RootBracket { what: &'static str, lo: f64, hi: f64 },

    #[error("root iteration for {what} did not converge after {iters} iterations (last residual {residual:e})")]
    RootConverge {
        what: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("quadrature failed to reach tolerance {tol:e} (error estimate {estimate:e} after {subdivisions} subdivisions)")]
    QuadratureTolerance {
        tol: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("layer position ambiguous or lost: {0}")]
    TrackingAmbiguity(String),

    #[error("state lost positivity: {0}")]
    Positivity(String),

    #[error("eigenfunction degenerate at the evaluation point: {0}")]
    DegenerateEigenfunction(String),

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("linear system is singular: {0}")]
    SingularMatrix(String),

    #[error("time step underflow at t = {t}: step {dt:e} below floor {floor:e}")]
    StepUnderflow { t: f64, dt: f64, floor: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
