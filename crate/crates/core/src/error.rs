use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("space dimension must be at least 5, got {0}")]
    DimensionTooSmall(u32),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("oscillation condition a_p^2 < 4(p-1) b_p violated (a_p={a_p}, b_p={b_p}, p={p})")]
    SpiralCondition { a_p: f64, b_p: f64, p: f64 },

    /// The integrator left the admissible region. Carries the last valid state.
    #[error("solution blew up at t={t} (v={v}, dv={dv})")]
    BlowUp { t: f64, v: f64, dv: f64 },

    #[error("step size underflow at t={0}")]
    StepUnderflow(f64),

    #[error("requested {requested} extrema but only {found} were located")]
    ExtremaCount { requested: usize, found: usize },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("singular or degenerate configuration: {0}")]
    Degenerate(String),

    #[error("eigenvector is not strictly positive after sign normalization")]
    PositivityViolation,

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("Cauchy-data matching failed at interface {interface} (residual {residual:.3e})")]
    MatchingFailure { interface: usize, residual: f64 },

    #[error("matching parameters left the trust region at interface {interface}: {detail}")]
    TrustRegion { interface: usize, detail: String },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("grid does not resolve the requested region: {0}")]
    Resolution(String),

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("newton step left the admissible domain irrecoverably")]
    DomainExit,
}

pub type Result<T> = std::result::Result<T, Error>;
