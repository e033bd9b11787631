//! Property tests across randomly drawn valid parameters: the structural
//! identities must hold everywhere, not just at hand-picked points.

use ancline::deterministic::det_rates_and_flux;
use ancline::diffusion::DiffusionSolution;
use ancline::finite::FiniteSolution;
use ancline::params::{DetParams, DiffusionParams, FiniteParams};
use proptest::prelude::*;

fn finite_params() -> impl Strategy<Value = FiniteParams> {
    (2usize..400, 0.0f64..2.0, 1e-4f64..1.0, 0.02f64..0.98)
        .prop_map(|(n, s, u, nu1)| FiniteParams::from_nu1(n, s, u, nu1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn finite_structure_holds_for_arbitrary_parameters(p in finite_params()) {
        let sol = FiniteSolution::solve(&p).unwrap();
        let n = p.pop_size;

        // stationary law
        let mass: f64 = sol.pi.iter().sum();
        prop_assert!((mass - 1.0).abs() < 1e-10);
        prop_assert!(sol.detailed_balance_residual() < 1e-10);

        // boundary values and monotonicity
        prop_assert_eq!(sol.a[0], 1.0);
        prop_assert_eq!(sol.a[n], 0.0);
        prop_assert_eq!(sol.b[0], 1.0);
        for level in 1..=n {
            prop_assert!(sol.a[level] <= sol.a[level - 1] + 1e-14);
            prop_assert!(sol.b[level] <= sol.b[level - 1] + 1e-14);
            prop_assert!(sol.w[level] >= -1e-14);
        }
        let w_mass: f64 = sol.w.iter().sum();
        prop_assert!((w_mass - 1.0).abs() < 1e-12);

        // ancestral-type distribution
        let (p1, p0) = sol.ancestral_probs();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-10);
        prop_assert!(p1 <= sol.b1() + 1e-14);

        // flux balance
        let fluxes = sol.mutation_fluxes();
        prop_assert!((fluxes.f10 - fluxes.f01).abs() <= 1e-12 * fluxes.f10.max(fluxes.f01));
        let worst = sol
            .flux_identity_residuals()
            .iter()
            .fold(0.0f64, |m, r| m.max(r.abs()));
        prop_assert!(worst < 1e-10);

        // rate ordering: selection inflates 1->0, deflates 0->1
        let (q10, q01) = sol.mutation_rates().unwrap();
        prop_assert!(q10 >= p.u * p.nu0 * (1.0 - 1e-12));
        prop_assert!(q01 <= p.u * p.nu1 * (1.0 + 1e-12));
    }

    #[test]
    fn deterministic_structure_holds_for_arbitrary_parameters(
        s in 0.0f64..3.0,
        u in 1e-4f64..2.0,
        nu1 in 0.02f64..0.98,
    ) {
        let sol = det_rates_and_flux(&DetParams::from_nu1(s, u, nu1).unwrap());
        prop_assert!((0.0..1.0).contains(&sol.p));
        prop_assert!((0.0..=1.0).contains(&sol.y_inf));
        prop_assert!(sol.p_prime > 0.0);
        // q10 (1 - p) = u nu0 and q01 = u nu1 (1 - p) by construction
        prop_assert!((sol.q10 * (1.0 - sol.p) - u * (1.0 - nu1)).abs() < 1e-15 * u);
        prop_assert!((sol.q01 - u * nu1 * (1.0 - sol.p)).abs() < 1e-15 * u);
        // flux balance in closed form
        let (f10, f01) = (sol.f10(), sol.f01());
        prop_assert!((f10 - f01).abs() <= 1e-12 * f10.max(f01));
        // closed-form ancestral probability stays in [0, 1]
        prop_assert!((0.0..=1.0).contains(&sol.p_a1));
    }
}

proptest! {
    // diffusion solves cost more; fewer cases
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn diffusion_structure_holds_for_arbitrary_parameters(
        sigma in 0.0f64..12.0,
        theta in 0.05f64..8.0,
        nu1 in 0.02f64..0.98,
    ) {
        let p = DiffusionParams::from_nu1(sigma, theta, nu1).unwrap();
        let sol = DiffusionSolution::solve(&p, 1e-12).unwrap();
        prop_assert_eq!(sol.alpha[0], 1.0);
        prop_assert_eq!(sol.beta[0], 1.0);
        for n in 1..=sol.m {
            prop_assert!(sol.alpha[n] <= sol.alpha[n - 1] + 1e-14);
            prop_assert!(sol.beta[n] <= sol.beta[n - 1] + 1e-14);
        }
        let (p1, p0) = sol.ancestral_probs();
        prop_assert!((p0 + p1 - 1.0).abs() < 1e-9);
        let fluxes = sol.mutation_fluxes();
        prop_assert!((fluxes.f10 - fluxes.f01).abs() <= 1e-11 * fluxes.f10.max(fluxes.f01));
        let (q10, q01) = sol.mutation_rates().unwrap();
        prop_assert!(q10 >= theta * (1.0 - nu1) * (1.0 - 1e-11));
        prop_assert!(q01 <= theta * nu1 * (1.0 + 1e-11));
    }
}
