//! Stationary structure of the ancestral line in the two-type Moran model
//! with mutation and selection.
//!
//! The crate computes, exactly, the stationary law of the population, the
//! line-counting process of the pruned lookdown ancestral selection graph,
//! the ancestral-type distribution, and the marginal mutation fluxes and
//! rates on the ancestral line — in the finite-population regime and in its
//! diffusion and deterministic limits — and validates all of it against
//! exact stochastic simulation ([`sim`]).
//!
//! Entry points:
//! - [`finite::FiniteSolution::solve`] for a population of `N` individuals,
//! - [`diffusion::DiffusionSolution::solve`] for the diffusion limit,
//! - [`deterministic::det_rates_and_flux`] for the deterministic limit,
//! - [`sim`] for the Gillespie-style oracles.

// level-indexed loops mirror the recursions they implement
#![allow(clippy::needless_range_loop)]

pub mod deterministic;
pub mod diffusion;
pub mod error;
pub mod finite;
pub mod flux;
pub mod numeric;
pub mod params;
pub mod quadrature;
pub mod sim;
pub mod tridiag;

pub use error::{Error, Result};
pub use flux::{FluxReport, MutationFluxes};
pub use params::{DetParams, DiffusionParams, FiniteParams};
