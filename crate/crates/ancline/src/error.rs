use thiserror::Error;

/// Errors shared across the solver and simulation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter record violates one of its range constraints.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Gaussian elimination of a tridiagonal system hit a zero pivot.
    #[error("singular tridiagonal system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    /// Adaptive truncation kept doubling without the monitored scalar
    /// settling below the requested tolerance.
    #[error("truncation did not converge: {monitor} still moved {delta:e} at M = {m}")]
    NoConvergence {
        monitor: &'static str,
        delta: f64,
        m: usize,
    },

    /// Quadrature refinement stalled above the requested tolerance.
    #[error("quadrature failed: requested {requested:e}, achieved {achieved:e}")]
    QuadratureFailure { requested: f64, achieved: f64 },

    /// The moment gap beta_1 - beta_2 is non-positive; the tail/sampling
    /// bridge is undefined. Signals an upstream numeric failure.
    #[error("degenerate moment sequence: beta_1 - beta_2 = {0:e} <= 0")]
    DegenerateBeta(f64),

    /// The analytic derivative formulas carry a 1/sigma factor.
    #[error("analytic derivatives are undefined at sigma = 0; use the finite-difference route")]
    SigmaZero,

    /// A conditional rate was requested at a level the stationary line law
    /// does not charge.
    #[error("conditional rate undefined: stationary line law vanishes at level {level}")]
    UndefinedConditional { level: usize },

    /// A marginal rate divides by a vanishing source-type probability.
    #[error("degenerate denominator: stationary probability of the source type is zero")]
    DegenerateDenominator,

    /// The traced window produced too few ancestral mutation events for a
    /// meaningful estimate.
    #[error("ancestral window too short: observed {observed} mutation events, need {required}")]
    WindowTooShort { observed: u64, required: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
