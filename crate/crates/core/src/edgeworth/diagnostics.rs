//! κ_M and the sufficient-m heuristic.

use super::moments::{CumulantSet, MomentSet};
use crate::error::{Error, Result};
use crate::polycore::Coeff;

/// Exponent β of the heuristic, fixed for reproducible diagnostics.
pub const HEURISTIC_BETA: f64 = 1.0 / 6.0;
/// Moment excess τ: the heuristic uses κ_{n+τ}.
pub const HEURISTIC_TAU: f64 = 0.5;

/// κ_M = max(1, E|X|^M).
pub fn kappa(abs_moment: f64) -> f64 {
    abs_moment.max(1.0)
}

/// κ_M from an exact moment set, available for even M up to its order.
pub fn kappa_from_moments<C: Coeff>(m: &MomentSet<C>, order: u32) -> Option<f64> {
    m.abs_moment_even(order).map(|v| kappa(v.to_f64()))
}

/// κ_M from sample points (rows).
pub fn kappa_from_samples(points: &[Vec<f64>], order: f64) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let mean = points
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt().powf(order))
        .sum::<f64>()
        / points.len() as f64;
    kappa(mean)
}

/// Smallest m such that every m' ≥ m satisfies both
/// m' > κ^{max(4, 6/(n(1−3β)))} and
/// γ̄^{m'} m'^{(q+1)(n+1)/2} ≤ det(Σ)^{-1/2} λ₁^{-3(n−1)/2} κ^{n−2},
/// where κ = κ_{n+τ} is supplied by the caller.
pub fn min_m_heuristic<C: Coeff>(c: &CumulantSet<C>, n: u32, gamma_bar: f64, kappa_n_tau: f64) -> Result<u64> {
    if !(gamma_bar > 0.0 && gamma_bar < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma_bar {gamma_bar} outside (0,1)")));
    }
    if n < 3 {
        return Err(Error::InvalidParameter("n must be at least 3".into()));
    }
    c.require_nonsingular()?;
    let kappa = kappa_n_tau.max(1.0);
    let n_f = n as f64;
    let q = c.dim() as f64;
    let exponent = 4f64.max(6.0 / (n_f * (1.0 - 3.0 * HEURISTIC_BETA)));
    let kappa_floor = kappa.powf(exponent).floor() as u64 + 1;

    let lam1 = c.eigenvalues()[0];
    let log_det: f64 = c.eigenvalues().iter().map(|l| l.ln()).sum();
    let log_rhs = -0.5 * log_det - 1.5 * (n_f - 1.0) * lam1.ln() + (n_f - 2.0) * kappa.ln();
    let power = (q + 1.0) * (n_f + 1.0) / 2.0;
    let log_lhs = |m: f64| m * gamma_bar.ln() + power * m.ln();
    // log_lhs is concave in m with its maximum at m = power / (−ln γ̄).
    let peak = power / -gamma_bar.ln();
    if log_lhs(peak.max(1.0)) <= log_rhs {
        return Ok(kappa_floor.max(1));
    }
    let start = peak.ceil().max(1.0) as u64;
    let mut hi = start.max(1);
    while log_lhs(hi as f64) > log_rhs {
        hi *= 2;
    }
    let mut lo = start;
    if log_lhs(lo as f64) <= log_rhs {
        return Ok(lo.max(kappa_floor));
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if log_lhs(mid as f64) <= log_rhs {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(kappa_floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{rational, MultiIndex};
    use std::collections::BTreeMap;

    fn unit_1d() -> CumulantSet<f64> {
        CumulantSet::new(1, 2, BTreeMap::from([(MultiIndex::from([2]), 1.0)])).unwrap()
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_from_samples(&[vec![0.0], vec![0.0]], 3.0), 1.0);
        let m = MomentSet::gaussian(&crate::polycore::Matrix::identity(1), 4).unwrap();
        assert_eq!(kappa_from_moments(&m, 2), Some(1.0));
        assert_eq!(kappa_from_moments(&m, 4), Some(3.0));
        assert_eq!(m.abs_moment_even(4), Some(rational(3, 1)));
    }

    #[test]
    fn tiny_gamma_is_kappa_dominated() {
        assert_eq!(min_m_heuristic(&unit_1d(), 3, 1e-9, 1.0).unwrap(), 2);
    }

    #[test]
    fn matches_scan_oracle() {
        let got = min_m_heuristic(&unit_1d(), 3, 0.9, 1.0).unwrap();
        // Scan: last m that violates 0.9^m m^4 ≤ 1, plus one.
        let last_bad = (1..100_000u64)
            .filter(|&m| 0.9f64.powi(m as i32) * (m as f64).powi(4) > 1.0)
            .max()
            .unwrap();
        assert_eq!(got, last_bad + 1);
    }

    #[test]
    fn monotone_in_gamma() {
        let ms: Vec<u64> = [0.5, 0.8, 0.95]
            .iter()
            .map(|&g| min_m_heuristic(&unit_1d(), 4, g, 1.2).unwrap())
            .collect();
        assert!(ms[0] <= ms[1] && ms[1] <= ms[2]);
    }
}
