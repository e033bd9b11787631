//! Exact stationary quantities of the finite-population model: the Moran
//! stationary law, tail and sampling probabilities of the line-counting
//! process, the ancestral-type distribution, and the mutation fluxes and
//! rates on the ancestral line.
//!
//! The tail recursion
//! `((n+1)/N + s(N-n)/N + u) a_n = ((n+1)/N + u nu1) a_{n+1} + s(N-n)/N a_{n-1}`
//! with `a_0 = 1`, `a_N = 0`, and the sampling recursion
//! `((n-1)/N + s(N-n)/N + u) b_n = ((n-1)/N + u nu1) b_{n-1} + s(N-n)/N b_{n+1}`
//! with `b_0 = 1`, `b_{N+1} = 0`, are solved as full tridiagonal
//! boundary-value systems rather than truncated forward sweeps; both systems
//! are strictly diagonally dominant with margin `u * nu0`.

use crate::error::{Error, Result};
use crate::flux::{FluxReport, MutationFluxes};
use crate::numeric::log_sum_exp;
use crate::params::FiniteParams;
use crate::tridiag::TridiagonalSystem;

/// Which route computes the sampling probabilities `b_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMethod {
    /// Tridiagonal solve of the sampling recursion (production route).
    Recursion,
    /// Falling-factorial moments of the stationary law (cross-validation
    /// route, `O(N^2)`); capped at `N <= 5000`.
    Moments,
}

/// Largest population size accepted by the moments route.
pub const MOMENTS_ROUTE_CAP: usize = 5000;

/// Birth rate `q_Y(k, k+1)` of the type-1 count.
pub fn birth_rate(p: &FiniteParams, k: usize) -> f64 {
    let n = p.pop_size as f64;
    let k = k as f64;
    k * (n - k) / n + p.u * p.nu1 * (n - k)
}

/// Death rate `q_Y(k, k-1)` of the type-1 count.
pub fn death_rate(p: &FiniteParams, k: usize) -> f64 {
    let n = p.pop_size as f64;
    let k = k as f64;
    (1.0 + p.s) * (n - k) * k / n + p.u * p.nu0 * k
}

/// Stationary distribution of the type-1 count, `pi[k]` for `k = 0..=N`.
///
/// Built from detailed balance `pi_k q(k,k+1) = pi_{k+1} q(k+1,k)`; the
/// unnormalised weights are accumulated in log space and normalised with a
/// stabilised log-sum-exp, so `N = 10^4` cannot overflow.
pub fn moran_stationary(p: &FiniteParams) -> Vec<f64> {
    let n = p.pop_size;
    let mut log_w = vec![0.0; n + 1];
    for k in 0..n {
        log_w[k + 1] = log_w[k] + birth_rate(p, k).ln() - death_rate(p, k + 1).ln();
    }
    let norm = log_sum_exp(&log_w);
    log_w.iter().map(|lw| (lw - norm).exp()).collect()
}

/// Tail probabilities `a_n = P(L_inf > n)` for `n = 0..=N`.
pub fn tail_probs(p: &FiniteParams) -> Result<Vec<f64>> {
    let n = p.pop_size;
    let nf = n as f64;
    let mut a = vec![0.0; n + 1];
    a[0] = 1.0;
    a[n] = 0.0;
    if n < 2 {
        return Ok(a);
    }
    // unknowns a_1 .. a_{N-1}
    let m = n - 1;
    let mut sub = vec![0.0; m - 1];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m - 1];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let level = (i + 1) as f64; // recursion index n
        let up = p.s * (nf - level) / nf;
        diag[i] = (level + 1.0) / nf + up + p.u;
        if i + 1 < m {
            sup[i] = -((level + 1.0) / nf + p.u * p.nu1);
        }
        if i > 0 {
            sub[i - 1] = -up;
        } else {
            rhs[0] = up; // boundary a_0 = 1
        }
    }
    let interior = TridiagonalSystem::new(sub, diag, sup, rhs)?.solve()?;
    a[1..n].copy_from_slice(&interior);
    Ok(a)
}

/// Sampling probabilities `b_n` for `n = 0..=N+1`.
pub fn sampling_probs(p: &FiniteParams, method: SamplingMethod) -> Result<Vec<f64>> {
    match method {
        SamplingMethod::Recursion => sampling_probs_recursion(p),
        SamplingMethod::Moments => sampling_probs_moments(p, &moran_stationary(p)),
    }
}

fn sampling_probs_recursion(p: &FiniteParams) -> Result<Vec<f64>> {
    let n = p.pop_size;
    let nf = n as f64;
    // unknowns b_1 .. b_N
    let mut sub = vec![0.0; n - 1];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let level = (i + 1) as f64;
        let up = p.s * (nf - level) / nf; // coefficient of b_{n+1}
        let down = (level - 1.0) / nf + p.u * p.nu1; // coefficient of b_{n-1}
        diag[i] = (level - 1.0) / nf + up + p.u;
        if i + 1 < n {
            sup[i] = -up;
        }
        if i > 0 {
            sub[i - 1] = -down;
        } else {
            rhs[0] = down; // boundary b_0 = 1
        }
    }
    let interior = TridiagonalSystem::new(sub, diag, sup, rhs)?.solve()?;
    let mut b = vec![0.0; n + 2];
    b[0] = 1.0;
    b[1..=n].copy_from_slice(&interior);
    b[n + 1] = 0.0;
    Ok(b)
}

fn sampling_probs_moments(p: &FiniteParams, pi: &[f64]) -> Result<Vec<f64>> {
    let n = p.pop_size;
    if n > MOMENTS_ROUTE_CAP {
        return Err(Error::InvalidParameter(format!(
            "moments route is capped at N <= {MOMENTS_ROUTE_CAP}, got {n}"
        )));
    }
    let mut b = vec![0.0; n + 2];
    b[0] = 1.0;
    // ratio[k] carries k^(m) / N^(m); each update multiplies by a factor in
    // [0, 1], so the products cannot overflow and underflow only below the
    // contribution threshold of the sums.
    let mut ratio = vec![1.0; n + 1];
    for m in 1..=n {
        let denom = (n - m + 1) as f64;
        let mut acc = 0.0;
        for k in 0..=n {
            ratio[k] *= if k >= m {
                (k - m + 1) as f64 / denom
            } else {
                0.0
            };
            acc += pi[k] * ratio[k];
        }
        b[m] = acc;
    }
    b[n + 1] = 0.0;
    Ok(b)
}

/// Ancestral-type distribution derived from a [`FiniteSolution`].
#[derive(Debug, Clone)]
pub struct AncestralSummary {
    /// `P(A_inf = 1)`, the probability of an unfit ancestor.
    pub p1: f64,
    /// `P(A_inf = 0)`.
    pub p0: f64,
    /// `gamma[k] = P(A_inf = 1 | Y = k)` for `k = 0..=N`.
    pub gamma: Vec<f64>,
    /// Probability that a given type-1 individual is the ancestor,
    /// `gamma[k] / k`; `NaN` at `k = 0` where the conditioning is empty.
    pub per_type1: Vec<f64>,
    /// Probability that a given type-0 individual is the ancestor,
    /// `(1 - gamma[k]) / (N - k)`; `NaN` at `k = N`.
    pub per_type0: Vec<f64>,
}

/// Joint transition-rate tables of the line-count / ancestral-type pair.
#[derive(Debug, Clone)]
pub struct JointLaRates {
    /// `beneficial[l][k] = u nu0 w_{l+k} / w_l`.
    pub beneficial: Vec<Vec<f64>>,
    /// `deleterious[l] = u nu1 (b_{l-1} - b_l) / (1 - b_l)`.
    pub deleterious: Vec<f64>,
}

/// All stationary sequences of the finite system.
///
/// Index conventions follow the recursions: `pi[k]` for `k = 0..=N`,
/// `a[n]` for `n = 0..=N`, `b[n]` for `n = 0..=N+1`, and `w[n]` for
/// `n = 1..=N` with `w[0] = 0` as padding.
#[derive(Debug, Clone)]
pub struct FiniteSolution {
    params: FiniteParams,
    pub pi: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub w: Vec<f64>,
}

impl FiniteSolution {
    /// Solves the stationary system with the recursion route for `b`.
    pub fn solve(params: &FiniteParams) -> Result<Self> {
        let a = tail_probs(params)?;
        let b = sampling_probs_recursion(params)?;
        let pi = moran_stationary(params);
        let n = params.pop_size;
        let mut w = vec![0.0; n + 1];
        for level in 1..=n {
            w[level] = a[level - 1] - a[level];
        }
        Ok(Self {
            params: *params,
            pi,
            a,
            b,
            w,
        })
    }

    pub fn params(&self) -> &FiniteParams {
        &self.params
    }

    pub fn pop_size(&self) -> usize {
        self.params.pop_size
    }

    /// Expected unfit fraction of the present population, `b_1 = E(Y/N)`.
    pub fn b1(&self) -> f64 {
        self.b[1]
    }

    /// `(P(A_inf = 1), P(A_inf = 0))` without the `O(N^2)` conditional table.
    pub fn ancestral_probs(&self) -> (f64, f64) {
        let n = self.params.pop_size;
        let mut p1 = 0.0;
        let mut p0 = 0.0;
        for level in 1..=n {
            p1 += self.w[level] * self.b[level];
            p0 += self.a[level - 1] * (self.b[level - 1] - self.b[level]);
        }
        (p1, p0)
    }

    /// Full ancestral-type distribution, including the per-class ancestor
    /// probabilities conditional on the present type-1 count.
    pub fn ancestral_summary(&self) -> AncestralSummary {
        let n = self.params.pop_size;
        let (p1, p0) = self.ancestral_probs();
        let mut gamma = vec![0.0; n + 1];
        for k in 1..=n {
            // gamma_k = sum_n w_n k^(n)/N^(n); the sampling ratio is updated
            // one factor at a time, each factor in (0, 1].
            let mut ratio = 1.0;
            let mut acc = 0.0;
            for level in 1..=k {
                ratio *= (k - level + 1) as f64 / (n - level + 1) as f64;
                if ratio == 0.0 {
                    break;
                }
                acc += self.w[level] * ratio;
            }
            gamma[k] = acc;
        }
        let per_type1 = gamma
            .iter()
            .enumerate()
            .map(|(k, g)| if k == 0 { f64::NAN } else { g / k as f64 })
            .collect();
        let per_type0 = gamma
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if k == n {
                    f64::NAN
                } else {
                    (1.0 - g) / (n - k) as f64
                }
            })
            .collect();
        AncestralSummary {
            p1,
            p0,
            gamma,
            per_type1,
            per_type0,
        }
    }

    /// Joint rate `q((l,1) -> (l+jump,0))` of a beneficial mutation on the
    /// ancestral line, `u nu0 w_{l+jump} / w_l`.
    pub fn joint_rate_beneficial(&self, level: usize, jump: usize) -> Result<f64> {
        let n = self.params.pop_size;
        if level < 1 || level > n || level + jump > n {
            return Err(Error::InvalidParameter(format!(
                "level {level} + jump {jump} outside [1, {n}]"
            )));
        }
        if self.w[level] <= 0.0 {
            return Err(Error::UndefinedConditional { level });
        }
        Ok(self.params.u * self.params.nu0 * self.w[level + jump] / self.w[level])
    }

    /// Joint rate `q((l,0) -> (l,1))` of a deleterious mutation on the
    /// ancestral line, `u nu1 (b_{l-1} - b_l) / sum_{j<=l} (b_{j-1} - b_j)`.
    pub fn joint_rate_deleterious(&self, level: usize) -> Result<f64> {
        let n = self.params.pop_size;
        if level < 1 || level > n {
            return Err(Error::InvalidParameter(format!(
                "level {level} outside [1, {n}]"
            )));
        }
        if self.w[level] <= 0.0 {
            return Err(Error::UndefinedConditional { level });
        }
        // the denominator telescopes to 1 - b_l
        let denom = 1.0 - self.b[level];
        if denom <= 0.0 {
            return Err(Error::DegenerateDenominator);
        }
        Ok(self.params.u * self.params.nu1 * (self.b[level - 1] - self.b[level]) / denom)
    }

    /// Dense joint-rate tables up to `max_level`: `beneficial[l][k]` holds
    /// `q((l,1) -> (l+k,0))` and `deleterious[l]` holds `q((l,0) -> (l,1))`;
    /// index 0 rows are padding. Levels the line law does not charge fail
    /// with [`Error::UndefinedConditional`].
    pub fn joint_la_rates(&self, max_level: usize) -> Result<JointLaRates> {
        let n = self.params.pop_size;
        let cap = max_level.min(n);
        let mut beneficial = vec![Vec::new()];
        let mut deleterious = vec![0.0];
        for level in 1..=cap {
            let mut row = Vec::with_capacity(n - level + 1);
            for jump in 0..=(n - level) {
                row.push(self.joint_rate_beneficial(level, jump)?);
            }
            beneficial.push(row);
            deleterious.push(self.joint_rate_deleterious(level)?);
        }
        Ok(JointLaRates {
            beneficial,
            deleterious,
        })
    }

    /// Marginal mutation fluxes and their per-level decomposition.
    pub fn mutation_fluxes(&self) -> MutationFluxes {
        let n = self.params.pop_size;
        let mut per_level_10 = vec![0.0; n + 1];
        let mut per_level_01 = vec![0.0; n + 1];
        let (c10, c01) = (
            self.params.u * self.params.nu0,
            self.params.u * self.params.nu1,
        );
        let mut f10 = 0.0;
        let mut f01 = 0.0;
        for level in 1..=n {
            per_level_10[level] = c10 * self.a[level - 1] * self.b[level];
            per_level_01[level] = c01 * self.w[level] * (self.b[level - 1] - self.b[level]);
            f10 += per_level_10[level];
            f01 += per_level_01[level];
        }
        MutationFluxes {
            f10,
            f01,
            per_level_10,
            per_level_01,
        }
    }

    /// Marginal mutation rates `(q(1,0), q(0,1))` on the ancestral line.
    pub fn mutation_rates(&self) -> Result<(f64, f64)> {
        let fluxes = self.mutation_fluxes();
        let (p1, p0) = self.ancestral_probs();
        if p1 <= 0.0 || p0 <= 0.0 {
            return Err(Error::DegenerateDenominator);
        }
        Ok((fluxes.f10 / p1, fluxes.f01 / p0))
    }

    /// Per-level residuals of the flux identity
    /// `f10^(n) + (1/N) sum_{i>n} w_i (b_{i-1}-b_i)
    ///   = f01^(n) + ((n-1)/N) w_n (b_{n-1}-b_n)`;
    /// index `n = 1..=N`, entry 0 is padding.
    pub fn flux_identity_residuals(&self) -> Vec<f64> {
        let n = self.params.pop_size;
        let nf = n as f64;
        let (c10, c01) = (
            self.params.u * self.params.nu0,
            self.params.u * self.params.nu1,
        );
        let mut residuals = vec![0.0; n + 1];
        // suffix_next[n+1] = sum_{i > n} w_i (b_{i-1} - b_i)
        let mut suffix = 0.0;
        let mut suffix_next = vec![0.0; n + 2];
        for level in (1..=n).rev() {
            suffix_next[level + 1] = suffix;
            suffix += self.w[level] * (self.b[level - 1] - self.b[level]);
        }
        for level in 1..=n {
            let coal = self.w[level] * (self.b[level - 1] - self.b[level]);
            let left = c10 * self.a[level - 1] * self.b[level] + suffix_next[level + 1] / nf;
            let right = c01 * coal + (level as f64 - 1.0) / nf * coal;
            residuals[level] = left - right;
        }
        residuals
    }

    /// Assembles fluxes, rates, per-level fluxes, and identity residuals.
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

    /// Largest relative detailed-balance violation of `pi`.
    pub fn detailed_balance_residual(&self) -> f64 {
        let n = self.params.pop_size;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let lhs = self.pi[k] * birth_rate(&self.params, k);
            let rhs = self.pi[k + 1] * death_rate(&self.params, k + 1);
            worst = worst.max((lhs - rhs).abs() / lhs.max(rhs).max(f64::MIN_POSITIVE));
        }
        worst
    }
}
