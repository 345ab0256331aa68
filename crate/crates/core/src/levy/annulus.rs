//! Truncated dyadic decomposition of the small-jump region `{0 < |z| <= ε}`.

use serde::{Deserialize, Serialize};

use super::LevyMeasure;
use crate::polycore::Matrix;
use crate::{Error, Result};

/// What happens to the shells deeper than the truncation depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TailPolicy {
    /// Discard them; the decomposition is rejected unless their share of
    /// the small-jump variance is below the tolerance.
    #[default]
    Drop,
    /// Replace them by a centered Gaussian with the same covariance.
    Gaussian,
}

/// Index of the shell containing ε: `2^{-r-1} < ε <= 2^{-r}`.
///
/// For dyadic ε this is `-log2 ε`; otherwise the first shell is partial.
pub fn dyadic_start(eps: f64) -> i32 {
    let mut r = (-eps.log2()).floor() as i32;
    while 2f64.powi(-r) < eps {
        r -= 1;
    }
    while 2f64.powi(-r - 1) >= eps {
        r += 1;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub index: i32,
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
    pub mean: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnulusDecomposition {
    eps: f64,
    r0: i32,
    r_max: i32,
    policy: TailPolicy,
    shells: Vec<Shell>,
    covariance: Matrix<f64>,
    tail_covariance: Matrix<f64>,
    relative_tail: f64,
}

fn trace(m: &Matrix<f64>) -> f64 {
    m.diagonal().iter().sum()
}

impl AnnulusDecomposition {
    /// Shells `r0..=r_max` of `{0 < |z| <= ε}`.
    pub fn new(
        measure: &dyn LevyMeasure,
        eps: f64,
        r_max: i32,
        policy: TailPolicy,
        tolerance: f64,
    ) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
        }
        let r0 = dyadic_start(eps);
        if r_max < r0 {
            return Err(Error::InvalidParameter(format!("depth {r_max} above first shell {r0}")));
        }
        let shells = (r0..=r_max)
            .map(|r| {
                let lo = 2f64.powi(-r - 1);
                let hi = if r == r0 { eps } else { 2f64.powi(-r) };
                Shell { index: r, lo, hi, mass: measure.shell_mass(lo, hi), mean: measure.shell_mean(lo, hi) }
            })
            .collect();
        let covariance = measure.shell_second_moment(0.0, eps);
        let tail_covariance = measure.shell_second_moment(0.0, 2f64.powi(-r_max - 1));
        let total = trace(&covariance);
        let relative_tail = if total > 0.0 { trace(&tail_covariance) / total } else { 0.0 };
        if policy == TailPolicy::Drop && relative_tail > tolerance {
            return Err(Error::InvalidParameter(format!(
                "dropped tail carries {relative_tail:e} of the small-jump variance (tolerance {tolerance:e})"
            )));
        }
        Ok(AnnulusDecomposition { eps, r0, r_max, policy, shells, covariance, tail_covariance, relative_tail })
    }

    /// Shallowest depth whose dropped tail meets `tolerance`.
    pub fn with_tolerance(measure: &dyn LevyMeasure, eps: f64, tolerance: f64) -> Result<Self> {
        let r0 = dyadic_start(eps);
        let total = trace(&measure.shell_second_moment(0.0, eps));
        for r_max in r0..r0 + 400 {
            let tail = trace(&measure.shell_second_moment(0.0, 2f64.powi(-r_max - 1)));
            if total == 0.0 || tail <= tolerance * total {
                return Self::new(measure, eps, r_max, TailPolicy::Drop, tolerance);
            }
        }
        Err(Error::InvalidParameter(format!("no depth reaches tail tolerance {tolerance:e}")))
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn r0(&self) -> i32 {
        self.r0
    }

    pub fn r_max(&self) -> i32 {
        self.r_max
    }

    pub fn policy(&self) -> TailPolicy {
        self.policy
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    /// Full `Σ_ε`, including the tail.
    pub fn covariance(&self) -> &Matrix<f64> {
        &self.covariance
    }

    pub fn tail_covariance(&self) -> &Matrix<f64> {
        &self.tail_covariance
    }

    /// Covariance actually carried by the sampled shells.
    pub fn resolved_covariance(&self) -> Matrix<f64> {
        let n = self.covariance.rows();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.covariance.get(i, j) - self.tail_covariance.get(i, j));
            }
        }
        m
    }

    pub fn relative_tail(&self) -> f64 {
        self.relative_tail
    }

    /// Expected number of jumps over a time span `t`.
    pub fn expected_jumps(&self, t: f64) -> f64 {
        t * self.shells.iter().map(|s| s.mass).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{small_jump_covariance, RadialMeasure};

    #[test]
    fn start_index() {
        assert_eq!(dyadic_start(0.25), 2);
        assert_eq!(dyadic_start(1.0), 0);
        assert_eq!(dyadic_start(0.3), 1);
        assert_eq!(dyadic_start(2f64.powi(-6)), 6);
    }

    #[test]
    fn covariance_is_additive_over_shells() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        let eps = 2f64.powi(-3);
        let d = AnnulusDecomposition::with_tolerance(&m, eps, 1e-12).unwrap();
        let mut sum = d.tail_covariance().get(0, 0).to_owned();
        for s in d.shells() {
            sum += m.shell_second_moment(s.lo, s.hi).get(0, 0);
        }
        let direct = *small_jump_covariance(&m, eps).unwrap().matrix.get(0, 0);
        assert!((sum - direct).abs() < 1e-10 * direct);
        assert!(d.relative_tail() <= 1e-12);
        assert_eq!(d.r0(), 3);
    }

    #[test]
    fn partial_first_shell() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        let d = AnnulusDecomposition::new(&m, 0.3, 5, TailPolicy::Gaussian, 0.0).unwrap();
        assert_eq!(d.shells()[0].hi, 0.3);
        assert_eq!(d.shells()[0].lo, 0.25);
    }

    #[test]
    fn drop_rejects_heavy_tail() {
        let m = RadialMeasure::stable_like(2, 1.5, 1.0).unwrap();
        assert!(AnnulusDecomposition::new(&m, 0.25, 4, TailPolicy::Drop, 1e-6).is_err());
        assert!(AnnulusDecomposition::new(&m, 0.25, 4, TailPolicy::Gaussian, 1e-6).is_ok());
    }

    #[test]
    fn covariance_is_monotone_in_eps() {
        let m = RadialMeasure::stable_like(3, 1.1, 1.0).unwrap();
        let mut prev = 0.0;
        for k in 1..20 {
            let v = *small_jump_covariance(&m, k as f64 / 20.0).unwrap().matrix.get(2, 2);
            assert!(v > prev);
            prev = v;
        }
    }
}
