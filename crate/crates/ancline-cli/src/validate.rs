//! Desk-scale oracle suites: each check compares an analytic quantity with
//! its exact-simulation estimate and reports a machine-readable verdict.

use ancline::finite::{sampling_probs, tail_probs, FiniteSolution, SamplingMethod};
use ancline::params::FiniteParams;
use ancline::sim::ancestral::simulate_ancestral_line;
use ancline::sim::killed_asg::simulate_killed_asg;
use ancline::sim::line_counting::simulate_line_counting;
use ancline::sim::moran::{simulate_moran, total_variation};
use ancline::sim::{RunLength, SimConfig, SimEstimate};
use serde::Serialize;

use crate::error::Result;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub analytic: f64,
    pub simulated: f64,
    pub stderr: f64,
    /// Human-readable pass criterion.
    pub criterion: String,
    pub pass: bool,
}

impl CheckResult {
    fn three_se(name: impl Into<String>, analytic: f64, est: &SimEstimate) -> Self {
        Self {
            name: name.into(),
            analytic,
            simulated: est.value,
            stderr: est.stderr,
            criterion: "within 3 SE".into(),
            pass: est.z_score(analytic) <= 3.0,
        }
    }

    fn bound(name: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            analytic: bound,
            simulated: observed,
            stderr: 0.0,
            criterion: format!("<= {bound}"),
            pass: observed <= bound,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(
            "oracle validation",
            vec![
                "check".into(),
                "analytic".into(),
                "simulated".into(),
                "stderr".into(),
                "pass".into(),
            ],
        );
        for c in &self.checks {
            t.push_row(vec![
                Cell::Str(c.name.clone()),
                Cell::Num(c.analytic),
                Cell::Num(c.simulated),
                Cell::Num(c.stderr),
                Cell::Int(c.pass as i64),
            ]);
        }
        t
    }
}

/// Runs the full oracle suite with fixed desk-scale budgets.
///
/// Budgets are sized so every 3-SE comparison has real statistical power
/// and the whole suite stays within a couple of minutes on one core.
pub fn run_validation(seed: u64) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    // 1. Moran occupancy, total variation against the exact stationary law.
    //    Fast-mixing parameters: 10^6 measured events resolve the law to
    //    TV well under 0.02.
    {
        let p = FiniteParams::from_nu1(100, 0.05, 0.5, 0.5)?;
        let cfg = SimConfig::new(seed, RunLength::Events(1_250_000), 0.2, 1)?;
        let occ = simulate_moran(&p, &cfg, None)?;
        let exact = ancline::finite::moran_stationary(&p);
        let tv = total_variation(&occ.values(), &exact);
        checks.push(CheckResult::bound("moran-occupancy-tv", tv, 0.02));
    }

    // 2. Line-counting tails against the tail recursion.
    {
        let p = FiniteParams::from_nu1(50, 0.5, 0.1, 0.5)?;
        let cfg = SimConfig::new(seed ^ 0x1111, RunLength::Horizon(60_000.0), 0.1, 1)?;
        let stats = simulate_line_counting(&p, &cfg, None)?;
        let exact = tail_probs(&p)?;
        for (level, value) in exact.iter().enumerate() {
            // skip the definitional a_0 = 1 (its error bar is pure round-off)
            // and the sub-resolution tail
            if *value < 1e-3 || *value > 1.0 - 1e-12 {
                continue;
            }
            checks.push(CheckResult::three_se(
                format!("line-tail-a{level}"),
                *value,
                &stats.a_hat[level],
            ));
        }
    }

    // 3. Killed-graph absorption against the sampling recursion.
    {
        let p = FiniteParams::from_nu1(50, 0.5, 0.2, 0.7)?;
        let cfg = SimConfig::new(seed ^ 0x2222, RunLength::Events(0), 0.0, 100_000)?;
        let est = simulate_killed_asg(&p, 3, &cfg)?;
        let exact = sampling_probs(&p, SamplingMethod::Recursion)?;
        checks.push(CheckResult::three_se("killed-asg-b3", exact[3], &est));
    }

    // 4. Ancestral-line tracer against the finite solver.
    {
        let p = FiniteParams::from_nu1(50, 0.05, 0.02, 0.9)?;
        let sol = FiniteSolution::solve(&p)?;
        let (p1, _) = sol.ancestral_probs();
        let fluxes = sol.mutation_fluxes();
        let (q10, q01) = sol.mutation_rates()?;
        let cfg = SimConfig::new(seed ^ 0x3333, RunLength::Horizon(25_000.0), 0.1, 12)?;
        let est = simulate_ancestral_line(&p, &cfg, 20)?;
        checks.push(CheckResult::three_se("tracer-p-a1", p1, &est.p_a1));
        checks.push(CheckResult::three_se("tracer-f10", fluxes.f10, &est.f10));
        checks.push(CheckResult::three_se("tracer-f01", fluxes.f01, &est.f01));
        checks.push(CheckResult::three_se("tracer-q10", q10, &est.q10));
        checks.push(CheckResult::three_se("tracer-q01", q01, &est.q01));
        let combined = (est.f10.stderr * est.f10.stderr + est.f01.stderr * est.f01.stderr).sqrt();
        checks.push(CheckResult {
            name: "tracer-flux-balance".into(),
            analytic: est.f01.value,
            simulated: est.f10.value,
            stderr: combined,
            criterion: "within 3 combined SE".into(),
            pass: (est.f10.value - est.f01.value).abs() <= 3.0 * combined,
        });
    }

    let passed = checks.iter().all(|c| c.pass);
    Ok(ValidationReport {
        seed,
        checks,
        passed,
    })
}
