//! Flux and rate summaries shared by the finite and diffusion solvers.

/// Marginal mutation fluxes with their per-level decomposition.
///
/// Per-level vectors are indexed by the level `n >= 1`; entry 0 is padding.
#[derive(Debug, Clone)]
pub struct MutationFluxes {
    /// Beneficial flux `f(1,0)`, events per unit time.
    pub f10: f64,
    /// Deleterious flux `f(0,1)`; equals `f10` at stationarity.
    pub f01: f64,
    pub per_level_10: Vec<f64>,
    pub per_level_01: Vec<f64>,
}

/// Fluxes, rates, and flux-identity residuals of one regime.
#[derive(Debug, Clone)]
pub struct FluxReport {
    pub f10: f64,
    pub f01: f64,
    /// Beneficial mutation rate `q(1,0) = f(1,0) / P(A = 1)`.
    pub q10: f64,
    /// Deleterious mutation rate `q(0,1) = f(0,1) / P(A = 0)`.
    pub q01: f64,
    pub per_level_10: Vec<f64>,
    pub per_level_01: Vec<f64>,
    /// Per-level residuals of the flux identity; zero up to round-off.
    pub identity_residuals: Vec<f64>,
}

impl FluxReport {
    /// Relative imbalance `|f10 - f01| / max(f10, f01)`.
    pub fn relative_imbalance(&self) -> f64 {
        (self.f10 - self.f01).abs() / self.f10.max(self.f01).max(f64::MIN_POSITIVE)
    }

    /// Largest per-level identity residual in magnitude.
    pub fn max_identity_residual(&self) -> f64 {
        self.identity_residuals
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()))
    }
}
