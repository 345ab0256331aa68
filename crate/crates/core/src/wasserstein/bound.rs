//! Upper bound on `W_p` from densities: `C_p (∫|x|^p |f-g| dx)^{1/p}`.

use super::one_d::check_p;
use crate::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Constant in front of the integral bound, `2^{(p-1)/p}`.
pub fn bound_constant(p: f64) -> f64 {
    2f64.powf((p - 1.0) / p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityBound {
    /// `∫|x|^p |f-g| dx` over the box.
    pub integral: f64,
    /// `|I(grid) - I(2·grid)|`.
    pub residual: f64,
    /// Constant used in `bound`; see [`bound_constant`].
    pub constant: f64,
    pub bound: f64,
    pub mass_f: f64,
    pub mass_g: f64,
}

fn tensor_integral(
    h: &dyn Fn(&[f64]) -> f64,
    bx: &[(f64, f64)],
    panels: usize,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let q = bx.len();
    // 1D abscissae and weights per axis
    let axes: Vec<Vec<(f64, f64)>> = bx
        .iter()
        .map(|&(lo, hi)| {
            let width = (hi - lo) / panels as f64;
            let mut pts = Vec::with_capacity(panels * nodes.len());
            for k in 0..panels {
                let mid = lo + width * (k as f64 + 0.5);
                for (x, w) in nodes.iter().zip(weights) {
                    pts.push((mid + 0.5 * width * x, 0.5 * width * w));
                }
            }
            pts
        })
        .collect();
    let sizes: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = sizes.iter().product();
    let mut x = vec![0.0; q];
    let mut sum = 0.0;
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for d in 0..q {
            let (xd, wd) = axes[d][rem % sizes[d]];
            rem /= sizes[d];
            x[d] = xd;
            w *= wd;
        }
        sum += w * h(&x);
    }
    sum
}

/// Tensor Gauss-Legendre quadrature over `bx` with `grid` panels per axis.
/// Both densities must put at least `1 - 1e-6` of their mass in the box.
pub fn wp_density_bound(
    f: &dyn Fn(&[f64]) -> f64,
    g: &dyn Fn(&[f64]) -> f64,
    p: f64,
    bx: &[(f64, f64)],
    grid: usize,
) -> Result<DensityBound> {
    check_p(p)?;
    if bx.is_empty() || bx.iter().any(|&(lo, hi)| !(hi > lo)) || grid == 0 {
        return Err(Error::InvalidParameter("box and grid must be non-degenerate".into()));
    }
    let (nodes, weights) = gauss_legendre(8);
    let mass_f = tensor_integral(f, bx, grid, &nodes, &weights);
    let mass_g = tensor_integral(g, bx, grid, &nodes, &weights);
    for (name, m) in [("first", mass_f), ("second", mass_g)] {
        if (1.0 - m).abs() > 1e-6 {
            return Err(Error::Quadrature(format!("box holds mass {m} of the {name} density")));
        }
    }
    let integrand = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.powf(p) * (f(x) - g(x)).abs()
    };
    let coarse = tensor_integral(&integrand, bx, grid, &nodes, &weights);
    let fine = tensor_integral(&integrand, bx, 2 * grid, &nodes, &weights);
    let constant = bound_constant(p);
    Ok(DensityBound {
        integral: fine,
        residual: (fine - coarse).abs(),
        constant,
        bound: constant * fine.powf(1.0 / p),
        mass_f,
        mass_g,
    })
}
