//! Wasserstein distances: exact in one dimension, exact assignment for
//! equal-size point clouds, a density-based upper bound, and rate fits.

mod bound;
mod lap;
mod one_d;
mod rate;

pub use bound::{bound_constant, wp_density_bound, DensityBound};
pub use lap::{certify, solve_assignment, Assignment, CostMatrix};
pub use one_d::{wp_1d_exact, wp_1d_quantiles, wp_1d_samples, wp_1d_sorted, Law1d};
pub use rate::{rate_fit, rate_fit_replicates, Aggregate, RateFit};

use one_d::check_p;
use statrs::function::erf::erf_inv;

use crate::{Error, Result};

/// Largest cloud accepted by the exact assignment solver.
pub const MAX_POINTS: usize = 4096;

/// `n` equal-weight points in `R^q`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    dim: usize,
    coords: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidParameter("point cloud must be non-empty and rectangular".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(EmpiricalDistribution { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidParameter("points of mixed dimension".into()));
        }
        Self::new(dim, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn projected(&self, direction: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.point(i).iter().zip(direction).map(|(x, d)| x * d).sum())
            .collect()
    }
}

/// `|x - y|^p`.
pub fn ground_cost(x: &[f64], y: &[f64], p: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if p == 2.0 {
        d2
    } else {
        d2.sqrt().powf(p)
    }
}

fn check_pair(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> Result<()> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    if a.len() != b.len() {
        return Err(Error::UnequalSizes(a.len(), b.len()));
    }
    if a.len() > MAX_POINTS {
        return Err(Error::SizeCap { n: a.len(), cap: MAX_POINTS });
    }
    Ok(())
}

/// Optimal matching of two equal-size clouds under `|x - y|^p`.
pub fn optimal_assignment(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    p: f64,
) -> Result<Assignment> {
    check_p(p)?;
    check_pair(a, b)?;
    let cost = CostMatrix::from_fn(a.len(), |i, j| ground_cost(a.point(i), b.point(j), p))?;
    solve_assignment(&cost)
}

/// Exact `W_p` between two empirical measures of equal size.
pub fn wp_empirical(a: &EmpiricalDistribution, b: &EmpiricalDistribution, p: f64) -> Result<f64> {
    let asg = optimal_assignment(a, b, p)?;
    // summed in sorted order so that swapping the arguments is bit-exact
    let mut costs: Vec<f64> =
        asg.row_to_col.iter().enumerate().map(|(i, &j)| ground_cost(a.point(i), b.point(j), p)).collect();
    costs.sort_by(f64::total_cmp);
    Ok((costs.iter().sum::<f64>() / a.len() as f64).powf(1.0 / p))
}

/// Transport cost `(n⁻¹ Σ |a_i - b_{σ(i)}|^p)^{1/p}` of a given matching.
pub fn coupling_cost(
    a: &EmpiricalDistribution,
    b: &EmpiricalDistribution,
    matching: &[usize],
    p: f64,
) -> Result<f64> {
    check_pair(a, b)?;
    let s: f64 = matching.iter().enumerate().map(|(i, &j)| ground_cost(a.point(i), b.point(j), p)).sum();
    Ok((s / a.len() as f64).powf(1.0 / p))
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while k > 0 {
        inv += (k % base) as f64 * f;
        k /= base;
        f /= base as f64;
    }
    inv
}

/// Fixed, roughly uniform unit directions: evenly spaced angles on the
/// circle, Halton points pushed through the normal quantile otherwise.
pub fn slicing_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    match dim {
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let t = std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        _ => (1..=count as u64)
            .map(|k| {
                let g: Vec<f64> = (0..dim)
                    .map(|d| {
                        let u = radical_inverse(k, PRIMES[d % PRIMES.len()]);
                        std::f64::consts::SQRT_2 * erf_inv(2.0 * u - 1.0)
                    })
                    .collect();
                let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                g.iter().map(|x| x / n).collect()
            })
            .collect(),
    }
}

/// Diagnostic only: mean of 1D distances over 64 fixed projections.
pub fn sliced_wasserstein(a: &EmpiricalDistribution, b: &EmpiricalDistribution, p: f64) -> Result<f64> {
    check_p(p)?;
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    let dirs = slicing_directions(a.dim, 64);
    let mut total = 0.0;
    for d in &dirs {
        total += wp_1d_samples(&a.projected(d), &b.projected(d), p)?;
    }
    Ok(total / dirs.len() as f64)
}
