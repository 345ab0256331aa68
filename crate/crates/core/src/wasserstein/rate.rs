//! Log-log slope fits with replicate-level percentile bootstrap.

use serde::{Deserialize, Serialize};

use crate::sampling::RngStream;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// How replicate values at one abscissa are reduced to a single ordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregate {
    Mean,
    RootMeanSquare,
}

impl Aggregate {
    fn apply(self, values: impl Iterator<Item = f64>) -> f64 {
        let (mut s, mut n) = (0.0, 0usize);
        for v in values {
            s += match self {
                Aggregate::Mean => v,
                Aggregate::RootMeanSquare => v * v,
            };
            n += 1;
        }
        let m = s / n as f64;
        match self {
            Aggregate::Mean => m,
            Aggregate::RootMeanSquare => m.sqrt(),
        }
    }
}

fn least_squares(lx: &[f64], ly: &[f64]) -> (f64, f64) {
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn logs(v: &[f64], what: &str) -> Result<Vec<f64>> {
    v.iter()
        .map(|&x| {
            if x > 0.0 && x.is_finite() {
                Ok(x.ln())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be positive, got {x}")))
            }
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`; the interval is the
/// point estimate itself.
pub fn rate_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    if xs.len() != ys.len() {
        return Err(Error::UnequalSizes(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidParameter("rate fit needs at least 3 points".into()));
    }
    let (lx, ly) = (logs(xs, "abscissae")?, logs(ys, "ordinates")?);
    if lx.iter().all(|&v| v == lx[0]) {
        return Err(Error::InvalidParameter("abscissae must not all coincide".into()));
    }
    let (slope, intercept) = least_squares(&lx, &ly);
    Ok(RateFit { slope, intercept, ci_low: slope, ci_high: slope })
}

/// Fit on the aggregated replicates `values[i][k]` (abscissa `i`,
/// replicate `k`), with a percentile bootstrap that resamples whole
/// replicates across all abscissae.
pub fn rate_fit_replicates(
    xs: &[f64],
    values: &[Vec<f64>],
    aggregate: Aggregate,
    bootstrap_reps: usize,
    confidence: f64,
    rng: &mut RngStream,
) -> Result<RateFit> {
    if values.len() != xs.len() {
        return Err(Error::UnequalSizes(xs.len(), values.len()));
    }
    let reps = values.first().map_or(0, Vec::len);
    if reps == 0 || values.iter().any(|v| v.len() != reps) {
        return Err(Error::InvalidParameter("replicate matrix must be rectangular and non-empty".into()));
    }
    let ys: Vec<f64> = values.iter().map(|v| aggregate.apply(v.iter().copied())).collect();
    let mut fit = rate_fit(xs, &ys)?;
    if bootstrap_reps == 0 {
        return Ok(fit);
    }
    let lx = logs(xs, "abscissae")?;
    let mut slopes = Vec::with_capacity(bootstrap_reps);
    let mut pick = vec![0usize; reps];
    for _ in 0..bootstrap_reps {
        for k in pick.iter_mut() {
            *k = ((rng.uniform() * reps as f64) as usize).min(reps - 1);
        }
        let ly: Option<Vec<f64>> = values
            .iter()
            .map(|v| {
                let y = aggregate.apply(pick.iter().map(|&k| v[k]));
                (y > 0.0).then(|| y.ln())
            })
            .collect();
        if let Some(ly) = ly {
            slopes.push(least_squares(&lx, &ly).0);
        }
    }
    if slopes.is_empty() {
        return Ok(fit);
    }
    slopes.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    let at = |q: f64| slopes[((q * (slopes.len() - 1) as f64).round() as usize).min(slopes.len() - 1)];
    fit.ci_low = at(tail);
    fit.ci_high = at(1.0 - tail);
    Ok(fit)
}
