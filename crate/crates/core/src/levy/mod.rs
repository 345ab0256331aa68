//! Lévy measures seen through dyadic annuli `{2^{-r-1} < |z| <= 2^{-r}}`,
//! small-jump covariances and Cramér-type diagnostics.

mod annulus;
mod atomic;
mod cramer;
mod radial;
mod sphere;

pub use annulus::{dyadic_start, AnnulusDecomposition, Shell, TailPolicy};
pub use atomic::AtomicMeasure;
pub use cramer::{
    cramer_amplify, cramer_probe, probe_grid, sufficient_condition_check, SufficientCheck,
};
pub use radial::{RadialKind, RadialMeasure};
pub use sphere::{sphere_area, sphere_moment, uniform_direction};

use crate::polycore::{Matrix, MultiIndex};
use crate::sampling::RngStream;
use crate::Result;

/// Radii bounding the dyadic annulus with index `r`.
pub fn annulus_bounds(r: i32) -> (f64, f64) {
    (2f64.powi(-r - 1), 2f64.powi(-r))
}

/// A Lévy measure on `R^q` queried through radial shells `{lo < |z| <= hi}`.
///
/// `hi` may be infinite for the big-jump region. Second moments over
/// `lo = 0` must be finite.
pub trait LevyMeasure: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;

    /// Radius beyond which the measure vanishes.
    fn support_radius(&self) -> f64;

    fn shell_mass(&self, lo: f64, hi: f64) -> f64;

    fn shell_mean(&self, lo: f64, hi: f64) -> Vec<f64>;

    /// `∫ z zᵀ ν(dz)` over the shell.
    fn shell_second_moment(&self, lo: f64, hi: f64) -> Matrix<f64>;

    /// `∫ z^α ν(dz)` over the shell.
    fn shell_moment(&self, alpha: &MultiIndex, lo: f64, hi: f64) -> f64;

    /// Mass of the shell cell whose direction has first coordinate
    /// `u = z_1/|z|` in `(u_lo, u_hi]`; the cell touching `u = -1` is closed.
    fn mass_in_region(&self, lo: f64, hi: f64, u_lo: f64, u_hi: f64) -> f64;

    /// One draw from ν restricted to the shell and normalized.
    fn sample_shell(&self, lo: f64, hi: f64, rng: &mut RngStream) -> Vec<f64>;

    /// Adds `count` independent shell draws into `acc`.
    fn add_shell_samples(&self, lo: f64, hi: f64, count: u64, rng: &mut RngStream, acc: &mut [f64]) {
        for _ in 0..count {
            for (a, z) in acc.iter_mut().zip(self.sample_shell(lo, hi, rng)) {
                *a += z;
            }
        }
    }

    /// Characteristic function `(re, im)` of the normalized shell law at `s`.
    fn shell_char_fn(&self, lo: f64, hi: f64, s: &[f64]) -> Result<(f64, f64)>;

    /// Invariant under all rotations of `R^q`.
    fn is_rotation_invariant(&self) -> bool {
        false
    }

    fn annulus_mass(&self, r: i32) -> f64 {
        let (lo, hi) = annulus_bounds(r);
        self.shell_mass(lo, hi)
    }

    fn annulus_covariance(&self, r: i32) -> Matrix<f64> {
        let (lo, hi) = annulus_bounds(r);
        self.shell_second_moment(lo, hi)
    }

    fn annulus_mean(&self, r: i32) -> Vec<f64> {
        let (lo, hi) = annulus_bounds(r);
        self.shell_mean(lo, hi)
    }

    fn big_jump_mass(&self, eps: f64) -> f64 {
        self.shell_mass(eps, f64::INFINITY)
    }

    fn big_jump_mean(&self, eps: f64) -> Vec<f64> {
        self.shell_mean(eps, f64::INFINITY)
    }

    fn sample_big_jump(&self, eps: f64, rng: &mut RngStream) -> Vec<f64> {
        self.sample_shell(eps, f64::INFINITY, rng)
    }
}

/// `Σ_ε = ∫_{0<|z|<=ε} z zᵀ ν(dz)`; `clamped` is set when ε exceeded the support.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallJumpCovariance {
    pub matrix: Matrix<f64>,
    pub clamped: bool,
}

pub fn small_jump_covariance(measure: &dyn LevyMeasure, eps: f64) -> Result<SmallJumpCovariance> {
    if !(eps > 0.0) {
        return Err(crate::Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let tau = measure.support_radius();
    let clamped = eps > tau;
    let matrix = measure.shell_second_moment(0.0, eps.min(tau));
    Ok(SmallJumpCovariance { matrix, clamped })
}
