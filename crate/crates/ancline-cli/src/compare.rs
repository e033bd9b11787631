//! Pedigree-versus-phylogeny mutation flux comparison and the selection
//! strength search.
//!
//! Pedigree studies see every mutation in the standing population; the
//! total per-individual flux is `(1-b1)(v0 + u nu1) + b1 (v1 + u nu0)`,
//! where `v0`, `v1` are the within-class (invisible) rates arranged so that
//! both classes share one total rate. Phylogenetic estimates see only the
//! ancestral line: `P(A=0)(v0 + q01) + P(A=1)(v1 + q10)`. Purifying
//! selection makes the second smaller.

use ancline::finite::FiniteSolution;
use ancline::params::FiniteParams;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FluxComparison {
    #[serde(rename = "N")]
    pub pop_size: usize,
    pub s: f64,
    pub u: f64,
    pub nu1: f64,
    pub total_rate: f64,
    /// Within-class neutral rate of the fit class, `total_rate - u nu1`.
    pub v0: f64,
    /// Within-class neutral rate of the unfit class, `total_rate - u nu0`.
    pub v1: f64,
    pub b1: f64,
    pub p_a1: f64,
    pub q10: f64,
    pub q01: f64,
    pub pedigree_flux: f64,
    pub phylo_flux: f64,
    pub ratio: f64,
}

/// Evaluates both fluxes at the solver's stationary quantities.
pub fn compare_fluxes(p: &FiniteParams, total_rate: f64) -> Result<FluxComparison> {
    let required = (p.u * p.nu0).max(p.u * p.nu1);
    let v0 = total_rate - p.u * p.nu1;
    let v1 = total_rate - p.u * p.nu0;
    if v0 <= 0.0 || v1 <= 0.0 {
        return Err(CliError::NegativeNeutralRate {
            total_rate,
            required,
        });
    }
    let sol = FiniteSolution::solve(p)?;
    let (p_a1, p_a0) = sol.ancestral_probs();
    let (q10, q01) = sol.mutation_rates()?;
    let b1 = sol.b1();
    let pedigree_flux = (1.0 - b1) * (v0 + p.u * p.nu1) + b1 * (v1 + p.u * p.nu0);
    let phylo_flux = p_a0 * (v0 + q01) + p_a1 * (v1 + q10);
    Ok(FluxComparison {
        pop_size: p.pop_size,
        s: p.s,
        u: p.u,
        nu1: p.nu1,
        total_rate,
        v0,
        v1,
        b1,
        p_a1,
        q10,
        q01,
        pedigree_flux,
        phylo_flux,
        ratio: pedigree_flux / phylo_flux,
    })
}

/// Bisection tolerance on `b1(s*) - target`.
pub const B1_TOL: f64 = 1e-9;

/// Finds the selection strength at which the expected unfit fraction
/// `b1 = E(Y/N)` hits `target`. `b1` is strictly decreasing in `s` from
/// `b1(0)` towards 0, so the root is unique.
///
/// The `s` field of `base` is ignored.
pub fn find_s_for_b1(base: &FiniteParams, target: f64) -> Result<f64> {
    let b1_at = |s: f64| -> Result<f64> { Ok(FiniteSolution::solve(&base.with_s(s)?)?.b1()) };
    let b1_neutral = b1_at(0.0)?;
    if target >= b1_neutral {
        if target == b1_neutral {
            return Ok(0.0);
        }
        return Err(CliError::TargetUnreachable {
            target,
            lo: 0.0,
            hi: b1_neutral,
        });
    }
    if target <= 0.0 {
        return Err(CliError::TargetUnreachable {
            target,
            lo: 0.0,
            hi: b1_neutral,
        });
    }
    // bracket, then bisect
    let mut hi = 1e-4;
    while b1_at(hi)? > target {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(CliError::TargetUnreachable {
                target,
                lo: 0.0,
                hi: b1_neutral,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let b1 = b1_at(mid)?;
        if (b1 - target).abs() <= B1_TOL {
            return Ok(mid);
        }
        if b1 > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> FiniteParams {
        FiniteParams::from_nu1(2000, 0.0, 8e-4, 0.99).unwrap()
    }

    #[test]
    fn neutral_target_is_the_left_endpoint() {
        let b1_neutral = FiniteSolution::solve(&base()).unwrap().b1();
        let s = find_s_for_b1(&base(), b1_neutral).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn found_s_reproduces_the_target() {
        let target = 0.25;
        let s = find_s_for_b1(&base(), target).unwrap();
        let b1 = FiniteSolution::solve(&base().with_s(s).unwrap())
            .unwrap()
            .b1();
        assert!((b1 - target).abs() <= B1_TOL, "b1 = {b1}");
    }

    #[test]
    fn unreachable_targets_are_rejected() {
        assert!(matches!(
            find_s_for_b1(&base(), 0.9999),
            Err(CliError::TargetUnreachable { .. })
        ));
        assert!(matches!(
            find_s_for_b1(&base(), 0.0),
            Err(CliError::TargetUnreachable { .. })
        ));
    }

    #[test]
    fn neutral_comparison_fluxes_coincide() {
        // at s = 0 the ancestral rates are neutral and P(A = i) matches the
        // population frequencies, so both fluxes agree
        let p = base();
        let cmp = compare_fluxes(&p, 1.6e-3).unwrap();
        assert!(
            (cmp.pedigree_flux - cmp.phylo_flux).abs() <= 1e-12 * cmp.pedigree_flux,
            "{} vs {}",
            cmp.pedigree_flux,
            cmp.phylo_flux
        );
        assert!((cmp.ratio - 1.0).abs() <= 1e-9);
        assert!((cmp.pedigree_flux - 1.6e-3).abs() <= 1e-12);
    }

    #[test]
    fn selection_depresses_the_phylogenetic_flux() {
        let p = base().with_s(0.01).unwrap();
        let cmp = compare_fluxes(&p, 1.6e-3).unwrap();
        assert!(cmp.ratio > 1.0);
        assert!((cmp.pedigree_flux - 1.6e-3).abs() <= 1e-12);
    }

    #[test]
    fn too_small_total_rate_is_rejected() {
        let err = compare_fluxes(&base(), 5e-4).unwrap_err();
        assert!(matches!(err, CliError::NegativeNeutralRate { .. }));
    }
}
