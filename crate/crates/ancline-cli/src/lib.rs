//! Command-line front end for the ancestral-line Moran toolkit: figure
//! data, the pedigree-versus-phylogeny flux comparison, selection-strength
//! search, and oracle validation suites, with CSV, JSON, and SVG output.

pub mod compare;
pub mod config;
pub mod error;
pub mod figures;
pub mod summary;
pub mod svg;
pub mod table;
pub mod validate;

pub use error::{CliError, Result};
