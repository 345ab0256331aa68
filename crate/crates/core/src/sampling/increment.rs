//! Lévy increments over a step `h`, with the small jumps below ε either
//! simulated, replaced by a matched Gaussian, or by a perturbed normal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{sample_poisson, GaussianSampler, PerturbedNormalSampler, RngStream, SmallJumpSampler};
use crate::edgeworth::CumulantSet;
use crate::levy::{dyadic_start, small_jump_covariance, AnnulusDecomposition, LevyMeasure, TailPolicy};
use crate::perturbation::perturbation_from_cumulants;
use crate::polycore::{Matrix, MultiIndex};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncrementMode {
    Exact,
    Gaussianized,
    Perturbed,
}

/// How the small jumps are resolved.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmallJumpConfig {
    /// Number of shells below the first one; `None` picks the shallowest
    /// depth meeting `tolerance` with the tail dropped.
    pub depth: Option<u32>,
    pub tail: TailPolicy,
    pub tolerance: f64,
    /// Number of polynomial corrections in perturbed mode.
    pub perturbation_order: usize,
}

impl Default for SmallJumpConfig {
    fn default() -> Self {
        SmallJumpConfig { depth: None, tail: TailPolicy::Drop, tolerance: 1e-6, perturbation_order: 2 }
    }
}

impl SmallJumpConfig {
    pub fn decompose(&self, measure: &dyn LevyMeasure, eps: f64) -> Result<AnnulusDecomposition> {
        match self.depth {
            Some(k) => AnnulusDecomposition::new(
                measure,
                eps,
                dyadic_start(eps) + k as i32,
                self.tail,
                self.tolerance,
            ),
            None => AnnulusDecomposition::with_tolerance(measure, eps, self.tolerance),
        }
    }
}

/// Perturbed-normal stand-in for `Z_h^ε`, built from its cumulants
/// `h ∫_{|z|<=ε} z^α ν(dz)` with the expansion parameter set to 1.
pub fn small_jump_surrogate(
    measure: &dyn LevyMeasure,
    eps: f64,
    h: f64,
    r: usize,
) -> Result<Option<PerturbedNormalSampler>> {
    let q = measure.dim();
    let order = r as u32 + 2;
    let mut mu = BTreeMap::new();
    for k in 2..=order {
        for alpha in MultiIndex::of_order(q, k) {
            let v = h * measure.shell_moment(&alpha, 0.0, eps);
            if v != 0.0 {
                mu.insert(alpha, v);
            }
        }
    }
    if mu.is_empty() {
        return Ok(None);
    }
    let cumulants = CumulantSet::new(q, order, mu)?;
    let map = perturbation_from_cumulants(&cumulants, r)?;
    Ok(Some(PerturbedNormalSampler::new(&map, r)?))
}

#[derive(Debug)]
pub struct LevyIncrementSampler<'a> {
    measure: &'a dyn LevyMeasure,
    mode: IncrementMode,
    h: f64,
    eps: f64,
    drift_bar: Vec<f64>,
    diffusion: Matrix<f64>,
    small: Option<SmallJumpSampler<'a>>,
    gaussianized: Option<GaussianSampler>,
    perturbed: Option<PerturbedNormalSampler>,
    big_mass: f64,
}

impl<'a> LevyIncrementSampler<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        drift: &[f64],
        diffusion: &Matrix<f64>,
        measure: &'a dyn LevyMeasure,
        eps: f64,
        h: f64,
        mode: IncrementMode,
        config: &SmallJumpConfig,
    ) -> Result<Self> {
        let q = measure.dim();
        if drift.len() != q || diffusion.rows() != q {
            return Err(Error::DimensionMismatch { expected: q, found: drift.len().max(diffusion.rows()) });
        }
        if !(h > 0.0 && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("need h, eps > 0 (got {h}, {eps})")));
        }
        let big_mean = measure.big_jump_mean(eps);
        let drift_bar: Vec<f64> = drift.iter().zip(&big_mean).map(|(a, m)| a - m).collect();
        let (mut small, mut gaussianized, mut perturbed) = (None, None, None);
        match mode {
            IncrementMode::Exact => {
                small = Some(SmallJumpSampler::new(measure, config.decompose(measure, eps)?)?);
            }
            IncrementMode::Gaussianized => {
                let sigma_eps = small_jump_covariance(measure, eps)?.matrix;
                let bbt = diffusion.matmul(&diffusion.transpose());
                let mut total = Matrix::zeros(q, q);
                for i in 0..q {
                    for j in 0..q {
                        total.set(i, j, bbt.get(i, j) + sigma_eps.get(i, j));
                    }
                }
                gaussianized = Some(GaussianSampler::new(&total)?);
            }
            IncrementMode::Perturbed => {
                perturbed = small_jump_surrogate(measure, eps, h, config.perturbation_order)?;
            }
        }
        Ok(LevyIncrementSampler {
            measure,
            mode,
            h,
            eps,
            drift_bar,
            diffusion: diffusion.clone(),
            small,
            gaussianized,
            perturbed,
            big_mass: measure.big_jump_mass(eps),
        })
    }

    pub fn mode(&self) -> IncrementMode {
        self.mode
    }

    /// `a - ∫_{|z|>ε} z ν(dz)`.
    pub fn drift_bar(&self) -> &[f64] {
        &self.drift_bar
    }

    /// Uncompensated sum of the jumps larger than ε over one step.
    pub fn sample_big_jumps(&self, rng: &mut RngStream) -> Vec<f64> {
        let mut acc = vec![0.0; self.measure.dim()];
        let n = sample_poisson(self.h * self.big_mass, rng);
        for _ in 0..n {
            for (a, z) in acc.iter_mut().zip(self.measure.sample_big_jump(self.eps, rng)) {
                *a += z;
            }
        }
        acc
    }

    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let sh = self.h.sqrt();
        let mut out: Vec<f64> = self.drift_bar.iter().map(|a| a * self.h).collect();
        let mut add = |v: Vec<f64>, w: f64| out.iter_mut().zip(v).for_each(|(o, x)| *o += w * x);
        match self.mode {
            IncrementMode::Gaussianized => {
                if let Some(g) = &self.gaussianized {
                    add(g.sample(rng), sh);
                }
            }
            IncrementMode::Exact | IncrementMode::Perturbed => {
                let mut xi = vec![0.0; self.diffusion.cols()];
                rng.fill_normal(&mut xi);
                add(self.diffusion.mul_vec(&xi), sh);
                if let Some(s) = &self.small {
                    add(s.sample(self.h, rng), 1.0);
                }
                if let Some(p) = &self.perturbed {
                    add(p.sample(1.0, rng), 1.0);
                }
            }
        }
        add(self.sample_big_jumps(rng), 1.0);
        out
    }
}

#[allow(clippy::too_many_arguments)]
pub fn sample_levy_increment(
    drift: &[f64],
    diffusion: &Matrix<f64>,
    measure: &dyn LevyMeasure,
    eps: f64,
    h: f64,
    mode: IncrementMode,
    config: &SmallJumpConfig,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Ok(LevyIncrementSampler::new(drift, diffusion, measure, eps, h, mode, config)?.sample(rng))
}
