//! Validated parameter records for the three regimes.
//!
//! All solvers take one of these records; construction is the single place
//! where range constraints are enforced, so downstream code can assume
//! `u > 0`, `0 < nu0, nu1 < 1`, and `nu0 + nu1 = 1`.

use crate::error::{Error, Result};

/// Absolute slack allowed on `nu0 + nu1 = 1`.
const NU_SUM_TOL: f64 = 1e-12;

fn check_mutation(u: f64, nu0: f64, nu1: f64) -> Result<()> {
    if u <= 0.0 || !u.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "total mutation rate must satisfy u > 0, got {u}"
        )));
    }
    if !(nu0 > 0.0 && nu0 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beneficial mutation probability must satisfy 0 < nu0 < 1, got {nu0}"
        )));
    }
    if !(nu1 > 0.0 && nu1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "deleterious mutation probability must satisfy 0 < nu1 < 1, got {nu1}"
        )));
    }
    if ((nu0 + nu1) - 1.0).abs() > NU_SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "mutation probabilities must sum to 1, got nu0 + nu1 = {}",
            nu0 + nu1
        )));
    }
    Ok(())
}

fn check_selection(name: &str, s: f64) -> Result<()> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "selection strength must satisfy {name} >= 0, got {s}"
        )));
    }
    Ok(())
}

/// Finite-population Moran model: `pop_size` individuals, fit type 0
/// reproducing at rate `1 + s`, per-individual mutation rate `u` with
/// target type 0 (resp. 1) at probability `nu0` (resp. `nu1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteParams {
    pub pop_size: usize,
    pub s: f64,
    pub u: f64,
    pub nu0: f64,
    pub nu1: f64,
}

impl FiniteParams {
    pub fn new(pop_size: usize, s: f64, u: f64, nu0: f64, nu1: f64) -> Result<Self> {
        if pop_size < 1 {
            return Err(Error::InvalidParameter(
                "population size must be at least 1".into(),
            ));
        }
        check_selection("s", s)?;
        check_mutation(u, nu0, nu1)?;
        Ok(Self {
            pop_size,
            s,
            u,
            nu0,
            nu1,
        })
    }

    /// Convenience constructor taking only `nu1`; sets `nu0 = 1 - nu1`.
    pub fn from_nu1(pop_size: usize, s: f64, u: f64, nu1: f64) -> Result<Self> {
        Self::new(pop_size, s, u, 1.0 - nu1, nu1)
    }

    /// Replaces the selection strength, revalidating it.
    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(self.pop_size, s, self.u, self.nu0, self.nu1)
    }
}

/// Diffusion limit: rescaled selection `sigma = lim N s^N` and rescaled
/// total mutation rate `theta = lim N u^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParams {
    pub sigma: f64,
    pub theta: f64,
    pub nu0: f64,
    pub nu1: f64,
}

impl DiffusionParams {
    pub fn new(sigma: f64, theta: f64, nu0: f64, nu1: f64) -> Result<Self> {
        check_selection("sigma", sigma)?;
        check_mutation(theta, nu0, nu1)?;
        Ok(Self {
            sigma,
            theta,
            nu0,
            nu1,
        })
    }

    pub fn from_nu1(sigma: f64, theta: f64, nu1: f64) -> Result<Self> {
        Self::new(sigma, theta, 1.0 - nu1, nu1)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(sigma, self.theta, self.nu0, self.nu1)
    }
}

/// Deterministic limit: `N -> infinity` with unrescaled rates `s` and `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetParams {
    pub s: f64,
    pub u: f64,
    pub nu0: f64,
    pub nu1: f64,
}

impl DetParams {
    pub fn new(s: f64, u: f64, nu0: f64, nu1: f64) -> Result<Self> {
        check_selection("s", s)?;
        check_mutation(u, nu0, nu1)?;
        Ok(Self { s, u, nu0, nu1 })
    }

    pub fn from_nu1(s: f64, u: f64, nu1: f64) -> Result<Self> {
        Self::new(s, u, 1.0 - nu1, nu1)
    }

    pub fn with_s(&self, s: f64) -> Result<Self> {
        Self::new(s, self.u, self.nu0, self.nu1)
    }
}
