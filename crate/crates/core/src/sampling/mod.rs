//! Seeded samplers: Gaussian and perturbed-normal vectors, compensated
//! compound Poisson sums over annuli, and full Lévy increments.

mod gaussian;
mod increment;
mod jumps;
mod poisson;
mod stream;

pub use gaussian::{
    sample_gaussian, sample_perturbed_normal, CompiledPoly, GaussianSampler, PerturbedNormalSampler,
};
pub use increment::{
    sample_levy_increment, small_jump_surrogate, IncrementMode, LevyIncrementSampler,
    SmallJumpConfig,
};
pub use jumps::{sample_compound_poisson, sample_small_jumps, SmallJumpSampler};
pub use poisson::sample_poisson;
pub use stream::{purpose, stream_id, RngStream};
