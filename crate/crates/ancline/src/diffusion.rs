//! Diffusion-limit quantities: Wright's stationary moments, the tail
//! probabilities of the line-counting process, marginal fluxes and rates on
//! the ancestral line, and their analytic selection derivatives.
//!
//! The tail recursion `(n+1+sigma+theta) alpha_n = (n+1+theta nu1)
//! alpha_{n+1} + sigma alpha_{n-1}` and the sampling recursion
//! `(n-1+sigma+theta) beta_n = sigma beta_{n+1} + (n-1+theta nu1)
//! beta_{n-1}` are infinite boundary-value systems; they are truncated at an
//! index `M` that doubles until the monitored head coefficient stops moving.
//! The truncation error contaminates the head superexponentially slowly (the
//! complementary solution grows like `prod_j (j + theta nu1) / sigma^n`), so
//! modest `M` already gives machine-accurate heads even when the moments
//! themselves decay only algebraically.

use crate::error::{Error, Result};
use crate::flux::{FluxReport, MutationFluxes};
use crate::params::DiffusionParams;
use crate::quadrature::integrate_unit_log;
use crate::tridiag::TridiagonalSystem;

/// Initial truncation index of the adaptive doubling loop.
pub const INITIAL_TRUNCATION: usize = 128;
/// Hard cap on the truncation index.
pub const MAX_TRUNCATION: usize = 1 << 20;
/// Default convergence tolerance for the monitored head coefficients.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Absolute tolerance requested from the moment quadrature.
pub const QUADRATURE_TOL: f64 = 1e-12;

fn solve_truncated_alpha(p: &DiffusionParams, m: usize) -> Result<Vec<f64>> {
    // unknowns alpha_1 .. alpha_M with alpha_0 = 1, alpha_{M+1} = 0
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let n = (i + 1) as f64;
        diag[i] = n + 1.0 + p.sigma + p.theta;
        if i + 1 < m {
            sup[i] = -(n + 1.0 + p.theta * p.nu1);
        }
        if i > 0 {
            sub[i - 1] = -p.sigma;
        } else {
            rhs[0] = p.sigma;
        }
    }
    let interior = TridiagonalSystem::new(sub, diag, sup, rhs)?.solve()?;
    let mut alpha = Vec::with_capacity(m + 1);
    alpha.push(1.0);
    alpha.extend_from_slice(&interior);
    Ok(alpha)
}

fn solve_truncated_beta(p: &DiffusionParams, m: usize) -> Result<Vec<f64>> {
    // unknowns beta_1 .. beta_M with beta_0 = 1, beta_{M+1} = 0
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let n = (i + 1) as f64;
        diag[i] = n - 1.0 + p.sigma + p.theta;
        if i + 1 < m {
            sup[i] = -p.sigma;
        }
        if i > 0 {
            sub[i - 1] = -(n - 1.0 + p.theta * p.nu1);
        } else {
            rhs[0] = p.theta * p.nu1;
        }
    }
    let interior = TridiagonalSystem::new(sub, diag, sup, rhs)?.solve()?;
    let mut beta = Vec::with_capacity(m + 1);
    beta.push(1.0);
    beta.extend_from_slice(&interior);
    Ok(beta)
}

fn adaptive<F>(tol: f64, monitor: &'static str, solve: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<Vec<f64>>,
{
    let mut m = INITIAL_TRUNCATION;
    let mut current = solve(m)?;
    loop {
        let next_m = m * 2;
        if next_m > MAX_TRUNCATION {
            return Err(Error::NoConvergence {
                monitor,
                delta: f64::NAN,
                m,
            });
        }
        let refined = solve(next_m)?;
        let delta = (refined[1] - current[1]).abs();
        if delta < tol {
            return Ok(refined);
        }
        m = next_m;
        current = refined;
    }
}

/// Tail probabilities `alpha_n = P(L_inf > n)`, `n = 0..=M`, with the
/// truncation index doubled until `alpha_1` moves by less than `tol`.
pub fn alpha_tail(p: &DiffusionParams, tol: f64) -> Result<Vec<f64>> {
    adaptive(tol, "alpha_1", |m| solve_truncated_alpha(p, m))
}

/// Sampling probabilities `beta_n = E(Y_inf^n)` from the sampling recursion,
/// `n = 0..=M`, with the same adaptive truncation on `beta_1`.
pub fn beta_recursion(p: &DiffusionParams, tol: f64) -> Result<Vec<f64>> {
    adaptive(tol, "beta_1", |m| solve_truncated_beta(p, m))
}

/// Unnormalised Wright density integrals
/// `d_n = int_0^1 x^{n + theta nu1 - 1} (1-x)^{theta nu0 - 1} e^{-sigma x} dx`.
fn wright_integral(p: &DiffusionParams, n: usize) -> Result<f64> {
    let c1 = n as f64 + p.theta * p.nu1 - 1.0;
    let c0 = p.theta * p.nu0 - 1.0;
    let sigma = p.sigma;
    let (value, _) = integrate_unit_log(
        |node| c1 * node.ln_x + c0 * node.ln_one_minus_x - sigma * node.x,
        QUADRATURE_TOL,
    )?;
    Ok(value)
}

/// Moments `beta_n = E(Y_inf^n)` of Wright's distribution, `n = 0..=m`, by
/// direct quadrature of the density.
pub fn wright_moments(p: &DiffusionParams, m: usize) -> Result<Vec<f64>> {
    let d0 = wright_integral(p, 0)?;
    let mut beta = Vec::with_capacity(m + 1);
    beta.push(1.0);
    for n in 1..=m {
        beta.push(wright_integral(p, n)? / d0);
    }
    Ok(beta)
}

/// Tail probabilities from the sampling moments via the bridge
/// `alpha_n = sigma^n / prod_{j<=n}(j + theta nu1)
///            * (beta_{n+1} - beta_{n+2}) / (beta_1 - beta_2)`.
///
/// Needs `beta` up to index `n + 2`; the log-space prefactor keeps
/// `sigma^n / prod(j + theta nu1)` finite for any truncation depth.
pub fn alpha_from_beta(p: &DiffusionParams, beta: &[f64]) -> Result<Vec<f64>> {
    if beta.len() < 3 {
        return Err(Error::InvalidParameter(
            "need beta up to index 2 to bridge tails".into(),
        ));
    }
    let gap = beta[1] - beta[2];
    if gap <= 0.0 {
        return Err(Error::DegenerateBeta(gap));
    }
    let mut alpha = Vec::with_capacity(beta.len() - 2);
    alpha.push(1.0);
    let mut log_prefactor = 0.0;
    for n in 1..beta.len() - 2 {
        log_prefactor += p.sigma.ln() - (n as f64 + p.theta * p.nu1).ln();
        alpha.push(log_prefactor.exp() * (beta[n + 1] - beta[n + 2]) / gap);
    }
    Ok(alpha)
}

/// Analytic selection derivatives of the diffusion-limit quantities.
#[derive(Debug, Clone)]
pub struct DerivativeBundle {
    /// `d alpha_n / d sigma`; entry 0 is exactly 0.
    pub alpha_prime: Vec<f64>,
    /// `d beta_n / d sigma = beta_1 beta_n - beta_{n+1}`.
    pub beta_prime: Vec<f64>,
    /// `K = (1/sigma) [(1 + theta nu1)(alpha_0 - alpha_1) + sigma + theta nu0]`.
    pub k: f64,
    pub q10_prime: f64,
    pub q01_prime: f64,
}

/// Solved diffusion-limit system: `alpha` and `beta` on a common truncation
/// range `0..=m`.
#[derive(Debug, Clone)]
pub struct DiffusionSolution {
    params: DiffusionParams,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Common truncation index.
    pub m: usize,
    /// Convergence tolerance met by the monitored head coefficients. The
    /// tails of `alpha` sit below this level; the tails of `beta` need not
    /// (moments decay only algebraically), their head accuracy is
    /// guaranteed by the doubling criterion instead.
    pub tol: f64,
    /// Reciprocal of the Wright density integral, so the density
    /// `normalizer * x^(theta nu1 - 1) (1-x)^(theta nu0 - 1) e^(-sigma x)`
    /// integrates to one.
    pub normalizer: f64,
}

impl DiffusionSolution {
    pub fn solve(params: &DiffusionParams, tol: f64) -> Result<Self> {
        let alpha = alpha_tail(params, tol)?;
        let beta = beta_recursion(params, tol)?;
        let m = alpha.len().min(beta.len()) - 1;
        let normalizer = 1.0 / wright_integral(params, 0)?;
        Ok(Self {
            params: *params,
            alpha: alpha[..=m].to_vec(),
            beta: beta[..=m].to_vec(),
            m,
            tol,
            normalizer,
        })
    }

    pub fn params(&self) -> &DiffusionParams {
        &self.params
    }

    /// Stationary line-law weight `omega_n = alpha_{n-1} - alpha_n`.
    pub fn omega(&self, n: usize) -> f64 {
        debug_assert!((1..=self.m).contains(&n));
        self.alpha[n - 1] - self.alpha[n]
    }

    /// `(P(A_inf = 1), P(A_inf = 0))`.
    pub fn ancestral_probs(&self) -> (f64, f64) {
        let mut p1 = 0.0;
        let mut p0 = 0.0;
        for n in 1..=self.m {
            p1 += self.omega(n) * self.beta[n];
            p0 += self.alpha[n - 1] * (self.beta[n - 1] - self.beta[n]);
        }
        (p1, p0)
    }

    pub fn mutation_fluxes(&self) -> MutationFluxes {
        let (c10, c01) = (
            self.params.theta * self.params.nu0,
            self.params.theta * self.params.nu1,
        );
        let mut per_level_10 = vec![0.0; self.m + 1];
        let mut per_level_01 = vec![0.0; self.m + 1];
        let mut f10 = 0.0;
        let mut f01 = 0.0;
        for n in 1..=self.m {
            per_level_10[n] = c10 * self.alpha[n - 1] * self.beta[n];
            per_level_01[n] = c01 * self.omega(n) * (self.beta[n - 1] - self.beta[n]);
            f10 += per_level_10[n];
            f01 += per_level_01[n];
        }
        MutationFluxes {
            f10,
            f01,
            per_level_10,
            per_level_01,
        }
    }

    pub fn mutation_rates(&self) -> Result<(f64, f64)> {
        let fluxes = self.mutation_fluxes();
        let (p1, p0) = self.ancestral_probs();
        if p1 <= 0.0 || p0 <= 0.0 {
            return Err(Error::DegenerateDenominator);
        }
        Ok((fluxes.f10 / p1, fluxes.f01 / p0))
    }

    /// Per-level residuals of
    /// `theta nu0 alpha_{n-1} beta_n + sum_{i>n} omega_i (beta_{i-1}-beta_i)
    ///   = (theta nu1 + n - 1) omega_n (beta_{n-1} - beta_n)`.
    pub fn flux_identity_residuals(&self) -> Vec<f64> {
        let mut residuals = vec![0.0; self.m + 1];
        let mut suffix = 0.0;
        let mut suffix_next = vec![0.0; self.m + 2];
        for n in (1..=self.m).rev() {
            suffix_next[n + 1] = suffix;
            suffix += self.omega(n) * (self.beta[n - 1] - self.beta[n]);
        }
        let c10 = self.params.theta * self.params.nu0;
        for n in 1..=self.m {
            let coal = self.omega(n) * (self.beta[n - 1] - self.beta[n]);
            let left = c10 * self.alpha[n - 1] * self.beta[n] + suffix_next[n + 1];
            let right = (self.params.theta * self.params.nu1 + n as f64 - 1.0) * coal;
            residuals[n] = left - right;
        }
        residuals
    }

    pub fn flux_report(&self) -> Result<FluxReport> {
        let fluxes = self.mutation_fluxes();
        let (q10, q01) = self.mutation_rates()?;
        Ok(FluxReport {
            f10: fluxes.f10,
            f01: fluxes.f01,
            q10,
            q01,
            per_level_10: fluxes.per_level_10,
            per_level_01: fluxes.per_level_01,
            identity_residuals: self.flux_identity_residuals(),
        })
    }

    /// Analytic derivatives of the tails, moments, and rates with respect
    /// to `sigma`. Fails with [`Error::SigmaZero`] at `sigma = 0`, where the
    /// formulas are singular; use [`rate_derivatives_fd`] there.
    pub fn derivatives(&self) -> Result<DerivativeBundle> {
        if self.params.sigma == 0.0 {
            return Err(Error::SigmaZero);
        }
        let t1 = self.params.theta * self.params.nu1;
        let k = ((1.0 + t1) * (self.alpha[0] - self.alpha[1])
            + self.params.sigma
            + self.params.theta * self.params.nu0)
            / self.params.sigma;

        let mut alpha_prime = vec![0.0; self.m + 1];
        for n in 1..=self.m {
            alpha_prime[n] = self.alpha[n - 1] - k * self.alpha[n];
        }
        let mut beta_prime = vec![0.0; self.m];
        for n in 1..self.m {
            beta_prime[n] = self.beta[1] * self.beta[n] - self.beta[n + 1];
        }

        let mut num10 = 0.0;
        let mut num01 = 0.0;
        let mut p1 = 0.0;
        let mut p0 = 0.0;
        for n in 1..=self.m {
            num10 += alpha_prime[n] * self.beta[n];
            num01 += alpha_prime[n] * (self.beta[n - 1] - self.beta[n]);
            p1 += self.omega(n) * self.beta[n];
            p0 += self.alpha[n - 1] * (self.beta[n - 1] - self.beta[n]);
        }
        let q10_prime = self.params.theta * self.params.nu0 * self.beta[1] * num10 / (p1 * p1);
        let q01_prime =
            -self.params.theta * self.params.nu1 * (self.beta[0] - self.beta[1]) * num01
                / (p0 * p0);
        Ok(DerivativeBundle {
            alpha_prime,
            beta_prime,
            k,
            q10_prime,
            q01_prime,
        })
    }
}

/// Finite-difference rate derivatives: central when `sigma > h`, one-sided
/// at the `sigma = 0` boundary where the analytic formulas do not apply.
pub fn rate_derivatives_fd(p: &DiffusionParams, h: f64, tol: f64) -> Result<(f64, f64)> {
    let rates_at = |sigma: f64| -> Result<(f64, f64)> {
        DiffusionSolution::solve(&p.with_sigma(sigma)?, tol)?.mutation_rates()
    };
    if p.sigma > h {
        let plus = rates_at(p.sigma + h)?;
        let minus = rates_at(p.sigma - h)?;
        Ok((
            (plus.0 - minus.0) / (2.0 * h),
            (plus.1 - minus.1) / (2.0 * h),
        ))
    } else {
        let here = rates_at(p.sigma)?;
        let plus = rates_at(p.sigma + h)?;
        Ok(((plus.0 - here.0) / h, (plus.1 - here.1) / h))
    }
}
