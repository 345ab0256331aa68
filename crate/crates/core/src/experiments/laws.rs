//! Built-in test laws for normalized-sum experiments.

use std::collections::BTreeMap;

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf_inv;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::edgeworth::{moments_to_cumulants, CumulantSet, MomentSet};
use crate::polycore::{rational, MultiIndex, Rational};
use crate::sampling::RngStream;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestLaw {
    Gaussian,
    /// `E - 1` with `E ~ Exp(1)`.
    Exponential,
    /// Two independent centered exponentials.
    ProductExponential,
    /// Uniform on the unit disk.
    DiskUniform,
    /// `±1` with equal weight; lattice, rejected.
    Rademacher,
    /// `N - 1` with `N ~ Poisson(1)`; lattice, rejected.
    Poisson,
}

impl TestLaw {
    pub fn dim(self) -> usize {
        match self {
            TestLaw::ProductExponential | TestLaw::DiskUniform => 2,
            _ => 1,
        }
    }

    pub fn is_lattice(self) -> bool {
        matches!(self, TestLaw::Rademacher | TestLaw::Poisson)
    }

    pub fn has_quantile(self) -> bool {
        matches!(self, TestLaw::Gaussian | TestLaw::Exponential)
    }

    pub fn check_cramer(self) -> Result<()> {
        if self.is_lattice() {
            return Err(Error::Config(format!(
                "law {self:?} is a lattice law and violates Cramér's condition \
                 (limsup of |characteristic function| must stay below 1)"
            )));
        }
        Ok(())
    }

    /// Exact cumulants of one summand up to `order`.
    pub fn cumulants(self, order: u32) -> Result<CumulantSet<Rational>> {
        self.check_cramer()?;
        let order = order.max(2);
        let factorial = |k: u32| (1..k).fold(1i64, |a, j| a * j as i64);
        let mu: BTreeMap<MultiIndex, Rational> = match self {
            TestLaw::Gaussian => [(MultiIndex::new(vec![2]), rational(1, 1))].into_iter().collect(),
            TestLaw::Exponential => (2..=order).map(|k| (MultiIndex::new(vec![k]), rational(factorial(k), 1))).collect(),
            TestLaw::ProductExponential => (2..=order)
                .flat_map(|k| {
                    let v = rational(factorial(k), 1);
                    [(MultiIndex::new(vec![k, 0]), v.clone()), (MultiIndex::new(vec![0, k]), v)]
                })
                .collect(),
            TestLaw::DiskUniform => {
                let values = MultiIndex::up_to(2, 1, order)
                    .into_iter()
                    .map(|a| {
                        let v = disk_moment(a.get(0), a.get(1));
                        (a, v)
                    })
                    .collect();
                return moments_to_cumulants(&MomentSet::new(2, order, values)?);
            }
            TestLaw::Rademacher | TestLaw::Poisson => unreachable!("rejected above"),
        };
        CumulantSet::new(self.dim(), order, mu)
    }

    /// One draw of `m^{-1/2}(X_1 + … + X_m)`.
    pub fn sample_normalized_sum(self, m: u64, rng: &mut RngStream) -> Vec<f64> {
        let s = (m as f64).sqrt();
        let gamma_sum = |rng: &mut RngStream| {
            let g = Gamma::new(m as f64, 1.0).expect("positive shape").sample(rng);
            (g - m as f64) / s
        };
        match self {
            TestLaw::Gaussian => vec![rng.normal()],
            TestLaw::Exponential => vec![gamma_sum(rng)],
            TestLaw::ProductExponential => vec![gamma_sum(rng), gamma_sum(rng)],
            TestLaw::DiskUniform => {
                let mut acc = [0.0; 2];
                for _ in 0..m {
                    let r = rng.uniform().sqrt();
                    let th = std::f64::consts::TAU * rng.uniform();
                    acc[0] += r * th.cos();
                    acc[1] += r * th.sin();
                }
                vec![acc[0] / s, acc[1] / s]
            }
            TestLaw::Rademacher | TestLaw::Poisson => panic!("lattice laws are rejected at validation"),
        }
    }

    /// Quantile of the normalized sum at `u ∈ (0, 1)` (1D laws only).
    pub fn normalized_sum_quantile(self, m: u64, u: f64) -> Result<f64> {
        match self {
            TestLaw::Gaussian => Ok(probit(u)),
            TestLaw::Exponential => Ok((gamma_quantile(m as f64, u)? - m as f64) / (m as f64).sqrt()),
            _ => Err(Error::InvalidParameter(format!("no quantile function for {self:?}"))),
        }
    }
}

/// `E[x^a y^b]` for the uniform law on the unit disk.
fn disk_moment(a: u32, b: u32) -> Rational {
    if a % 2 == 1 || b % 2 == 1 {
        return rational(0, 1);
    }
    let dfact = |n: u32| -> i64 { (1..=n).rev().step_by(2).map(|k| k as i64).product::<i64>().max(1) };
    let a_ = if a == 0 { 1 } else { dfact(a - 1) };
    let b_ = if b == 0 { 1 } else { dfact(b - 1) };
    rational(2 * a_ * b_, (a + b + 2) as i64 * dfact(a + b))
}

/// Standard normal quantile.
pub fn probit(u: f64) -> f64 {
    std::f64::consts::SQRT_2 * erf_inv(2.0 * u - 1.0)
}

/// Quantile of `Gamma(shape, 1)` by safeguarded Newton iteration from the
/// Wilson–Hilferty guess.
pub fn gamma_quantile(shape: f64, u: f64) -> Result<f64> {
    if !(shape > 0.0) || !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma quantile needs shape > 0, u in (0,1): {shape}, {u}")));
    }
    let upper = u > 0.5;
    let target = if upper { 1.0 - u } else { u };
    // F(x) - u, written via the smaller tail for accuracy
    let residual = |x: f64| if upper { target - gamma_ur(shape, x) } else { gamma_lr(shape, x) - target };
    let log_norm = ln_gamma(shape);
    let density = |x: f64| ((shape - 1.0) * x.ln() - x - log_norm).exp();

    let z = probit(u);
    let c = 1.0 / (9.0 * shape);
    let mut x = shape * (1.0 - c + z * c.sqrt()).powi(3);
    if !(x > 0.0) {
        x = (u * shape * (ln_gamma(shape + 1.0)).exp()).powf(1.0 / shape).max(f64::MIN_POSITIVE);
    }
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for _ in 0..200 {
        let r = residual(x);
        if r == 0.0 {
            return Ok(x);
        }
        if r > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let f = density(x);
        let mut next = if f > 0.0 { x - r / f } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * x.max(1.0) };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
