//! Euler schemes for `dX = σ(X) dZ` driven by a Lévy process `Z`, with the
//! small jumps simulated, Gaussianized or perturbed, and a batch-coupled
//! pair of schemes for strong-error measurement.

mod coupled;
mod scheme;
mod sigma;

pub use coupled::{coupled_paths, Coupling, CoupledPaths};
pub use scheme::{continuous_gaussian_limit_path, euler_path, Path};
pub use sigma::SigmaFn;

use std::sync::Arc;

use crate::levy::LevyMeasure;
use crate::polycore::Matrix;
use crate::sampling::{purpose, IncrementMode, RngStream, SmallJumpConfig};
use crate::{Error, Result};

/// Driving Lévy process `Z_t = a t + B W_t + jumps(ν)` and the equation
/// `dX = σ(X) dZ`, `X_0 = x0`, on `[0, T]`.
#[derive(Clone, Debug)]
pub struct SdeSpec {
    pub drift: Vec<f64>,
    /// `q × q1`.
    pub diffusion: Matrix<f64>,
    pub measure: Arc<dyn LevyMeasure>,
    pub sigma: SigmaFn,
    pub x0: Vec<f64>,
    pub horizon: f64,
}

impl SdeSpec {
    pub fn d(&self) -> usize {
        self.x0.len()
    }

    pub fn q(&self) -> usize {
        self.drift.len()
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q();
        if self.diffusion.rows() != q || self.diffusion.cols() == 0 {
            return Err(Error::DimensionMismatch { expected: q, found: self.diffusion.rows() });
        }
        if self.measure.dim() != q {
            return Err(Error::DimensionMismatch { expected: q, found: self.measure.dim() });
        }
        if self.sigma.d() != self.d() || self.sigma.q() != q {
            return Err(Error::DimensionMismatch { expected: self.d() * q, found: self.sigma.d() * self.sigma.q() });
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidParameter(format!("horizon {} must be positive", self.horizon)));
        }
        if !(self.sigma.sup_bound().is_finite() && self.sigma.lipschitz().is_finite()) {
            return Err(Error::InvalidParameter("σ must have finite declared bounds".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub h: f64,
    pub eps: f64,
    pub mode: IncrementMode,
    /// How small-jump sums are paired with surrogate draws in
    /// [`coupled_paths`]; `None` for uncoupled single paths.
    pub coupling: Option<Coupling>,
    pub small_jumps: SmallJumpConfig,
    /// Substeps per coarse step for Brownian increments and the fine
    /// reference scheme.
    pub fine_steps: usize,
}

impl SchemeConfig {
    pub fn new(h: f64, eps: f64, mode: IncrementMode) -> Self {
        SchemeConfig {
            h,
            eps,
            mode,
            coupling: None,
            small_jumps: SmallJumpConfig::default(),
            fine_steps: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h < 1.0 && self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "need h, eps in (0, 1), got h={}, eps={}",
                self.h, self.eps
            )));
        }
        if self.fine_steps == 0 {
            return Err(Error::InvalidParameter("fine_steps must be positive".into()));
        }
        Ok(())
    }

    /// `⌊T/h⌋`, tolerant to rounding when `T/h` is an integer.
    pub fn steps(&self, horizon: f64) -> usize {
        (horizon / self.h + 1e-9).floor() as usize
    }
}

/// Identifies the replicate whose per-step streams drive a path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey {
    pub master_seed: u64,
    pub replicate: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, replicate: u64) -> Self {
        StreamKey { master_seed, replicate }
    }

    pub fn stream(&self, step: usize, tag: u64) -> RngStream {
        RngStream::for_task(self.master_seed, self.replicate, step as u64, tag)
    }

    /// Fine Brownian increments of one coarse step: `fine` vectors of
    /// dimension `width`, each with variance `h / fine` per coordinate.
    pub fn brownian(&self, step: usize, h: f64, fine: usize, width: usize) -> Vec<Vec<f64>> {
        let mut rng = self.stream(step, purpose::BROWNIAN);
        let s = (h / fine as f64).sqrt();
        (0..fine)
            .map(|_| {
                let mut v = vec![0.0; width];
                rng.fill_normal(&mut v);
                v.iter_mut().for_each(|x| *x *= s);
                v
            })
            .collect()
    }
}

pub(crate) fn sum_vectors(vs: &[Vec<f64>], width: usize) -> Vec<f64> {
    let mut acc = vec![0.0; width];
    for v in vs {
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}

pub(crate) fn add_scaled(acc: &mut [f64], v: &[f64], w: f64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += w * x;
    }
}
