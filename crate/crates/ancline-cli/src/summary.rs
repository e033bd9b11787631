//! Serializable summaries and per-level tables for the three regimes.

use ancline::deterministic::DetSolution;
use ancline::diffusion::{rate_derivatives_fd, DiffusionSolution};
use ancline::finite::FiniteSolution;
use serde::Serialize;

use crate::error::Result;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Serialize)]
pub struct FiniteSummary {
    #[serde(rename = "N")]
    pub pop_size: usize,
    pub s: f64,
    pub u: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub b1: f64,
    pub p_a1: f64,
    pub p_a0: f64,
    pub f10: f64,
    pub f01: f64,
    pub q10: f64,
    pub q01: f64,
    pub max_identity_residual: f64,
}

pub fn finite_summary(sol: &FiniteSolution) -> Result<FiniteSummary> {
    let p = sol.params();
    let report = sol.flux_report()?;
    let (p_a1, p_a0) = sol.ancestral_probs();
    Ok(FiniteSummary {
        pop_size: p.pop_size,
        s: p.s,
        u: p.u,
        nu0: p.nu0,
        nu1: p.nu1,
        b1: sol.b1(),
        p_a1,
        p_a0,
        f10: report.f10,
        f01: report.f01,
        q10: report.q10,
        q01: report.q01,
        max_identity_residual: report.max_identity_residual(),
    })
}

pub fn finite_table(sol: &FiniteSolution) -> Result<Table> {
    let report = sol.flux_report()?;
    let mut t = Table::new(
        "finite stationary sequences",
        vec![
            "n".into(),
            "a_n".into(),
            "b_n".into(),
            "w_n".into(),
            "f10_n".into(),
            "f01_n".into(),
            "identity_residual".into(),
        ],
    );
    for level in 1..=sol.pop_size() {
        t.push_row(vec![
            Cell::Int(level as i64),
            Cell::Num(sol.a[level]),
            Cell::Num(sol.b[level]),
            Cell::Num(sol.w[level]),
            Cell::Num(report.per_level_10[level]),
            Cell::Num(report.per_level_01[level]),
            Cell::Num(report.identity_residuals[level]),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct RateDerivatives {
    pub q10_prime: f64,
    pub q01_prime: f64,
    /// "analytic" for sigma > 0; "finite-difference" at the sigma = 0
    /// boundary, where the analytic formulas are singular.
    pub method: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffusionSummary {
    pub sigma: f64,
    pub theta: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub truncation: usize,
    pub normalizer: f64,
    pub beta1: f64,
    pub p_a1: f64,
    pub p_a0: f64,
    pub f10: f64,
    pub f01: f64,
    pub q10: f64,
    pub q01: f64,
    pub max_identity_residual: f64,
    pub derivatives: RateDerivatives,
}

pub fn diffusion_summary(sol: &DiffusionSolution) -> Result<DiffusionSummary> {
    let p = sol.params();
    let report = sol.flux_report()?;
    let (p_a1, p_a0) = sol.ancestral_probs();
    let derivatives = if p.sigma > 0.0 {
        let bundle = sol.derivatives()?;
        RateDerivatives {
            q10_prime: bundle.q10_prime,
            q01_prime: bundle.q01_prime,
            method: "analytic".into(),
        }
    } else {
        let (d10, d01) = rate_derivatives_fd(p, 1e-6, sol.tol)?;
        RateDerivatives {
            q10_prime: d10,
            q01_prime: d01,
            method: "finite-difference".into(),
        }
    };
    Ok(DiffusionSummary {
        sigma: p.sigma,
        theta: p.theta,
        nu0: p.nu0,
        nu1: p.nu1,
        truncation: sol.m,
        normalizer: sol.normalizer,
        beta1: sol.beta[1],
        p_a1,
        p_a0,
        f10: report.f10,
        f01: report.f01,
        q10: report.q10,
        q01: report.q01,
        max_identity_residual: report.max_identity_residual(),
        derivatives,
    })
}

pub fn diffusion_table(sol: &DiffusionSolution) -> Result<Table> {
    let report = sol.flux_report()?;
    let mut t = Table::new(
        "diffusion stationary sequences",
        vec![
            "n".into(),
            "alpha_n".into(),
            "beta_n".into(),
            "omega_n".into(),
            "f10_n".into(),
            "f01_n".into(),
            "identity_residual".into(),
        ],
    );
    for level in 1..=sol.m {
        t.push_row(vec![
            Cell::Int(level as i64),
            Cell::Num(sol.alpha[level]),
            Cell::Num(sol.beta[level]),
            Cell::Num(sol.omega(level)),
            Cell::Num(report.per_level_10[level]),
            Cell::Num(report.per_level_01[level]),
            Cell::Num(report.identity_residuals[level]),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct DetSummary {
    pub s: f64,
    pub u: f64,
    pub nu0: f64,
    pub nu1: f64,
    pub y_inf: f64,
    pub p: f64,
    pub p_prime: f64,
    pub q10: f64,
    pub q01: f64,
    pub p_a1: f64,
    pub f10: f64,
    pub f01: f64,
    pub q10_prime: f64,
    pub q01_prime: f64,
}

pub fn det_summary(sol: &DetSolution) -> DetSummary {
    let (q10_prime, q01_prime) = sol.rate_derivatives();
    DetSummary {
        s: sol.params.s,
        u: sol.params.u,
        nu0: sol.params.nu0,
        nu1: sol.params.nu1,
        y_inf: sol.y_inf,
        p: sol.p,
        p_prime: sol.p_prime,
        q10: sol.q10,
        q01: sol.q01,
        p_a1: sol.p_a1,
        f10: sol.f10(),
        f01: sol.f01(),
        q10_prime,
        q01_prime,
    }
}

pub fn det_table(sol: &DetSolution) -> Table {
    let s = det_summary(sol);
    let mut t = Table::new(
        "deterministic closed forms",
        vec![
            "y_inf".into(),
            "p".into(),
            "p_prime".into(),
            "q10".into(),
            "q01".into(),
            "p_a1".into(),
            "f10".into(),
            "f01".into(),
        ],
    );
    t.push_row(vec![
        Cell::Num(s.y_inf),
        Cell::Num(s.p),
        Cell::Num(s.p_prime),
        Cell::Num(s.q10),
        Cell::Num(s.q01),
        Cell::Num(s.p_a1),
        Cell::Num(s.f10),
        Cell::Num(s.f01),
    ]);
    t
}
