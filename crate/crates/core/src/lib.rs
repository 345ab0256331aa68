//! Edgeworth expansions and perturbed-normal samplers, Gaussian substitution
//! of Lévy small jumps, coupled Euler schemes, and Wasserstein estimators.

pub mod edgeworth;
pub mod error;
pub mod experiments;
pub mod levy;
pub mod perturbation;
pub mod polycore;
pub mod quadrature;
pub mod sampling;
pub mod sde;
pub mod wasserstein;

pub use error::{Error, Result};
