//! Exact one-dimensional distances: sorted samples or quantile functions.

use crate::quadrature::{integrate_adaptive, Estimate};
use crate::{Error, Result};

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")))
    }
}

/// A one-dimensional law given by equal-weight samples or a quantile function.
pub enum Law1d<'a> {
    Samples(&'a [f64]),
    Quantile(&'a dyn Fn(f64) -> f64),
}

pub(crate) fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `(n⁻¹ Σ |x_(i) - y_(i)|^p)^{1/p}` over order statistics.
pub fn wp_1d_samples(xs: &[f64], ys: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if xs.len() != ys.len() {
        return Err(Error::UnequalSizes(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let (a, b) = (sorted(xs), sorted(ys));
    Ok(wp_1d_sorted(&a, &b, p))
}

/// As [`wp_1d_samples`] for inputs already in ascending order.
pub fn wp_1d_sorted(a: &[f64], b: &[f64], p: f64) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum();
    (s / a.len() as f64).powf(1.0 / p)
}

/// `(∫_0^1 |F⁻¹(t) - G⁻¹(t)|^p dt)^{1/p}` by adaptive quadrature at relative
/// tolerance 1e-8 on the integral.
pub fn wp_1d_quantiles(f: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64, p: f64) -> Result<Estimate> {
    check_p(p)?;
    let est = integrate_adaptive(|t| (f(t) - g(t)).abs().powf(p), 0.0, 1.0, 1e-8, 1e-300)?;
    Ok(Estimate { value: est.value.max(0.0).powf(1.0 / p), error: est.error })
}

pub fn wp_1d_exact(a: Law1d<'_>, b: Law1d<'_>, p: f64) -> Result<f64> {
    match (a, b) {
        (Law1d::Samples(x), Law1d::Samples(y)) => wp_1d_samples(x, y, p),
        (Law1d::Quantile(f), Law1d::Quantile(g)) => Ok(wp_1d_quantiles(f, g, p)?.value),
        _ => Err(Error::InvalidParameter("mixing samples and quantile functions".into())),
    }
}
