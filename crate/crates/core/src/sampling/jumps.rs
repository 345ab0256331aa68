//! Compensated compound Poisson sums and truncated small-jump sums.

use super::{sample_poisson, GaussianSampler, RngStream};
use crate::levy::{AnnulusDecomposition, LevyMeasure, TailPolicy};
use crate::{Error, Result};

/// `Σ_{j<=N} X_j - t·intensity·E[X]` with `N ~ Poisson(t·intensity)`.
pub fn sample_compound_poisson(
    intensity: f64,
    mut jump: impl FnMut(&mut RngStream) -> Vec<f64>,
    mean_jump: &[f64],
    t: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    if !(intensity >= 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "compound Poisson needs intensity, t >= 0 (got {intensity}, {t})"
        )));
    }
    let mut acc: Vec<f64> = mean_jump.iter().map(|m| -t * intensity * m).collect();
    let n = sample_poisson(t * intensity, rng);
    for _ in 0..n {
        for (a, x) in acc.iter_mut().zip(jump(rng)) {
            *a += x;
        }
    }
    Ok(acc)
}

/// Sampler for `Z_t^ε`: one compensated compound Poisson sum per shell,
/// plus a Gaussian stand-in for the tail under [`TailPolicy::Gaussian`].
#[derive(Debug)]
pub struct SmallJumpSampler<'a> {
    measure: &'a dyn LevyMeasure,
    decomposition: AnnulusDecomposition,
    tail: Option<GaussianSampler>,
}

impl<'a> SmallJumpSampler<'a> {
    pub fn new(measure: &'a dyn LevyMeasure, decomposition: AnnulusDecomposition) -> Result<Self> {
        let tail = match decomposition.policy() {
            TailPolicy::Drop => None,
            TailPolicy::Gaussian => Some(GaussianSampler::new(decomposition.tail_covariance())?),
        };
        Ok(SmallJumpSampler { measure, decomposition, tail })
    }

    pub fn decomposition(&self) -> &AnnulusDecomposition {
        &self.decomposition
    }

    pub fn sample(&self, t: f64, rng: &mut RngStream) -> Vec<f64> {
        let q = self.measure.dim();
        let mut acc = vec![0.0; q];
        for shell in self.decomposition.shells() {
            if shell.mass <= 0.0 {
                continue;
            }
            let n = sample_poisson(t * shell.mass, rng);
            self.measure.add_shell_samples(shell.lo, shell.hi, n, rng, &mut acc);
            for (a, m) in acc.iter_mut().zip(&shell.mean) {
                *a -= t * m;
            }
        }
        if let Some(g) = &self.tail {
            let z = g.sample(rng);
            let s = t.sqrt();
            for (a, x) in acc.iter_mut().zip(z) {
                *a += s * x;
            }
        }
        acc
    }
}

pub fn sample_small_jumps(
    measure: &dyn LevyMeasure,
    decomposition: &AnnulusDecomposition,
    t: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Ok(SmallJumpSampler::new(measure, decomposition.clone())?.sample(t, rng))
}
