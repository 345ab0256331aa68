//! Exact density of the one-dimensional pushforward `x + Σ_k ε^k p_k(x)`
//! of `N(0, σ²)`, summed over all preimages.

use super::GradientPolyMap;
use crate::polycore::{Coeff, Polynomial};
use crate::{Error, Result};

/// Preimages are searched in `[-SEARCH_SIGMAS·σ, SEARCH_SIGMAS·σ]`; mass
/// beyond carries a Gaussian weight below `1e-31`.
const SEARCH_SIGMAS: f64 = 12.0;
const SCAN_CELLS: usize = 4800;

#[derive(Clone, Debug)]
pub struct Pushforward1d {
    map: Polynomial<f64>,
    derivative: Polynomial<f64>,
    variance: f64,
}

impl Pushforward1d {
    /// The map truncated after `r` corrections, at expansion parameter `eps`.
    pub fn new<C: Coeff>(m: &GradientPolyMap<C>, r: usize, eps: f64) -> Result<Self> {
        if m.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: m.dim() });
        }
        if r > m.order() {
            return Err(Error::InsufficientOrder { needed: r, have: m.order() });
        }
        let mut map = Polynomial::var(1, 0);
        for (k, grad) in m.gradients().iter().take(r).enumerate() {
            map = &map + &grad[0].to_f64().scale(&eps.powi(k as i32 + 1));
        }
        let derivative = map.partial(0);
        Ok(Pushforward1d { map, derivative, variance: m.covariance().get(0, 0).to_f64() })
    }

    pub fn density(&self, y: f64) -> f64 {
        let sd = self.variance.sqrt();
        let (lo, hi) = (-SEARCH_SIGMAS * sd, SEARCH_SIGMAS * sd);
        let g = |x: f64| self.map.eval_f64(&[x]) - y;
        let step = (hi - lo) / SCAN_CELLS as f64;
        let mut total = 0.0;
        let (mut a, mut ga) = (lo, g(lo));
        for i in 1..=SCAN_CELLS {
            let b = lo + step * i as f64;
            let gb = g(b);
            // a root on a cell boundary is counted in the cell it starts
            if ga == 0.0 || ga * gb < 0.0 {
                let x = bisect(&g, a, b, ga);
                let jac = self.derivative.eval_f64(&[x]).abs();
                if jac > 0.0 {
                    total += (-0.5 * x * x / self.variance).exp() / (2.0 * std::f64::consts::PI * self.variance).sqrt() / jac;
                }
            }
            a = b;
            ga = gb;
        }
        total
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    if ga == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `sup_y |pushforward density - φ(1 + Σ_{k<=r} ε^k Q_k)|` over `grid`.
pub fn pushforward_sup_error<C: Coeff>(m: &GradientPolyMap<C>, r: usize, eps: f64, grid: &[f64]) -> Result<f64> {
    let push = Pushforward1d::new(m, r, eps)?;
    let var = push.variance;
    let targets: Vec<Polynomial<f64>> = m.targets().iter().take(r).map(Polynomial::to_f64).collect();
    Ok(grid
        .iter()
        .map(|&y| {
            let phi = (-0.5 * y * y / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
            let corr: f64 = targets.iter().enumerate().map(|(k, q)| eps.powi(k as i32 + 1) * q.eval_f64(&[y])).sum();
            (push.density(y) - phi * (1.0 + corr)).abs()
        })
        .fold(0.0, f64::max))
}
