//! Squeezed-light Mach–Zehnder sensor networks: closed-form sensitivities,
//! a Gaussian-state oracle, resource-constrained optimization, and
//! squeezing/Fisher spectra over random circuits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod figures;
pub mod gaussian_oracle;
pub mod linalg;
pub mod network_model;
pub mod optimization;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
