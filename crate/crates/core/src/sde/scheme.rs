//! Single-path Euler schemes on the coarse grid `t_k = k h`.

use super::{add_scaled, sum_vectors, SchemeConfig, SdeSpec, StreamKey};
use crate::levy::small_jump_covariance;
use crate::polycore::{sym_sqrt, Matrix};
use crate::sampling::{
    purpose, sample_poisson, small_jump_surrogate, GaussianSampler, IncrementMode,
    PerturbedNormalSampler, SmallJumpSampler,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Per-configuration samplers for the pieces of one coarse increment.
/// Every piece draws from its own per-step stream.
#[derive(Debug)]
pub(crate) struct Drivers<'a> {
    pub spec: &'a SdeSpec,
    pub h: f64,
    pub eps: f64,
    pub fine: usize,
    pub width: usize,
    pub drift_bar: Vec<f64>,
    pub big_mass: f64,
    pub small: Option<SmallJumpSampler<'a>>,
    /// `(BBᵀ + Σ_ε)^{1/2}`.
    pub b_bar: Matrix<f64>,
    /// `N(0, h Σ_ε)`.
    pub gaussian_surrogate: GaussianSampler,
    pub perturbed_surrogate: Option<PerturbedNormalSampler>,
}

impl<'a> Drivers<'a> {
    pub fn new(spec: &'a SdeSpec, cfg: &SchemeConfig, need_small: bool) -> Result<Self> {
        spec.validate()?;
        cfg.validate()?;
        let q = spec.q();
        let m = spec.measure.as_ref();
        let big_mean = m.big_jump_mean(cfg.eps);
        let drift_bar = spec.drift.iter().zip(&big_mean).map(|(a, b)| a - b).collect();
        let sigma_eps = small_jump_covariance(m, cfg.eps)?.matrix;
        let bbt = spec.diffusion.matmul(&spec.diffusion.transpose());
        let mut total = Matrix::zeros(q, q);
        let mut scaled = Matrix::zeros(q, q);
        for i in 0..q {
            for j in 0..q {
                total.set(i, j, bbt.get(i, j) + sigma_eps.get(i, j));
                scaled.set(i, j, cfg.h * sigma_eps.get(i, j));
            }
        }
        let small = if need_small {
            Some(SmallJumpSampler::new(m, cfg.small_jumps.decompose(m, cfg.eps)?)?)
        } else {
            None
        };
        let perturbed_surrogate = if cfg.mode == IncrementMode::Perturbed {
            small_jump_surrogate(m, cfg.eps, cfg.h, cfg.small_jumps.perturbation_order)?
        } else {
            None
        };
        Ok(Drivers {
            spec,
            h: cfg.h,
            eps: cfg.eps,
            fine: cfg.fine_steps,
            width: q.max(spec.diffusion.cols()),
            drift_bar,
            big_mass: m.big_jump_mass(cfg.eps),
            small,
            b_bar: sym_sqrt(&total)?,
            gaussian_surrogate: GaussianSampler::new(&scaled)?,
            perturbed_surrogate,
        })
    }

    pub fn brownian(&self, key: &StreamKey, step: usize) -> Vec<Vec<f64>> {
        key.brownian(step, self.h, self.fine, self.width)
    }

    /// `B dW` for one Brownian increment of width `max(q, q1)`.
    pub fn diffuse(&self, dw: &[f64]) -> Vec<f64> {
        self.spec.diffusion.mul_vec(&dw[..self.spec.diffusion.cols()])
    }

    /// Uncompensated jumps above ε over one coarse step.
    pub fn big_jumps(&self, key: &StreamKey, step: usize) -> Vec<f64> {
        let m = self.spec.measure.as_ref();
        let mut rng = key.stream(step, purpose::BIG_JUMPS);
        let mut acc = vec![0.0; self.spec.q()];
        let eps = self.eps;
        for _ in 0..sample_poisson(self.h * self.big_mass, &mut rng) {
            add_scaled(&mut acc, &m.sample_big_jump(eps, &mut rng), 1.0);
        }
        acc
    }

    /// Compensated small-jump sums over each fine substep.
    pub fn small_jumps_fine(&self, key: &StreamKey, step: usize) -> Vec<Vec<f64>> {
        let q = self.spec.q();
        match &self.small {
            None => vec![vec![0.0; q]; self.fine],
            Some(s) => {
                let mut rng = key.stream(step, purpose::SMALL_JUMPS);
                let dt = self.h / self.fine as f64;
                (0..self.fine).map(|_| s.sample(dt, &mut rng)).collect()
            }
        }
    }

    /// Gaussian or perturbed-normal stand-in for one coarse small-jump sum.
    pub fn surrogate(&self, key: &StreamKey, step: usize, mode: IncrementMode) -> Vec<f64> {
        let mut rng = key.stream(step, purpose::SURROGATE);
        match (mode, &self.perturbed_surrogate) {
            (IncrementMode::Perturbed, Some(p)) => p.sample(1.0, &mut rng),
            (IncrementMode::Perturbed, None) => vec![0.0; self.spec.q()],
            _ => self.gaussian_surrogate.sample(&mut rng),
        }
    }
}

/// Coarse Euler iterates `X_{k+1} = X_k + σ(X_k) ΔZ_k` with increments in
/// the configured mode.
pub fn euler_path(spec: &SdeSpec, cfg: &SchemeConfig, key: &StreamKey) -> Result<Path> {
    let mode = cfg.mode;
    let drivers = Drivers::new(spec, cfg, mode == IncrementMode::Exact)?;
    let q = spec.q();
    let n = cfg.steps(spec.horizon);
    let mut x = spec.x0.clone();
    let mut buf = vec![0.0; spec.d() * q];
    let mut path = Path { times: vec![0.0], states: vec![x.clone()] };
    for k in 0..n {
        let dw = sum_vectors(&drivers.brownian(key, k), drivers.width);
        let mut dz: Vec<f64> = drivers.drift_bar.iter().map(|a| a * cfg.h).collect();
        match mode {
            IncrementMode::Gaussianized => add_scaled(&mut dz, &drivers.b_bar.mul_vec(&dw[..q]), 1.0),
            IncrementMode::Exact => {
                add_scaled(&mut dz, &drivers.diffuse(&dw), 1.0);
                add_scaled(&mut dz, &sum_vectors(&drivers.small_jumps_fine(key, k), q), 1.0);
            }
            IncrementMode::Perturbed => {
                add_scaled(&mut dz, &drivers.diffuse(&dw), 1.0);
                add_scaled(&mut dz, &drivers.surrogate(key, k, mode), 1.0);
            }
        }
        add_scaled(&mut dz, &drivers.big_jumps(key, k), 1.0);
        let at = x.clone();
        spec.sigma.apply(&at, &dz, &mut x, &mut buf);
        path.times.push((k + 1) as f64 * cfg.h);
        path.states.push(x.clone());
    }
    Ok(path)
}

/// Fine-grid Euler scheme for `dX = σ(X)(a dt + (BBᵀ+Σ_ε)^{1/2} dW)`,
/// reported on the coarse grid; shares the Brownian streams of the coarse
/// schemes.
pub fn continuous_gaussian_limit_path(spec: &SdeSpec, cfg: &SchemeConfig, key: &StreamKey) -> Result<Path> {
    if spec.measure.big_jump_mass(cfg.eps) > 0.0 {
        return Err(Error::BigJumpsPresent);
    }
    let drivers = Drivers::new(spec, cfg, false)?;
    let q = spec.q();
    let n = cfg.steps(spec.horizon);
    let dt = cfg.h / cfg.fine_steps as f64;
    let mut x = spec.x0.clone();
    let mut buf = vec![0.0; spec.d() * q];
    let mut path = Path { times: vec![0.0], states: vec![x.clone()] };
    for k in 0..n {
        for dw in drivers.brownian(key, k) {
            let mut dz: Vec<f64> = spec.drift.iter().map(|a| a * dt).collect();
            add_scaled(&mut dz, &drivers.b_bar.mul_vec(&dw[..q]), 1.0);
            let at = x.clone();
            spec.sigma.apply(&at, &dz, &mut x, &mut buf);
        }
        path.times.push((k + 1) as f64 * cfg.h);
        path.states.push(x.clone());
    }
    Ok(path)
}
