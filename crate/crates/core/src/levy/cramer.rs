//! Numerical probes of the uniform Cramér condition on rescaled annuli and
//! of the Lebesgue-to-ν mass comparison over cell unions.

use rand::seq::SliceRandom;

use super::sphere::first_coordinate_quantile;
use super::{annulus_bounds, LevyMeasure};
use crate::sampling::RngStream;
use crate::{Error, Result};

/// `points` equally spaced frequencies in `[rho, rho_max]`.
pub fn probe_grid(rho: f64, rho_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![rho];
    }
    (0..points).map(|i| rho + (rho_max - rho) * i as f64 / (points - 1) as f64).collect()
}

/// `sup_{|s| in grid} |ξ_r(s)|` along `direction`, where `ξ_r(s)` is the
/// characteristic function of the annulus-`r` jump law at `2^r s`.
pub fn cramer_probe(
    measure: &dyn LevyMeasure,
    r: i32,
    grid: &[f64],
    direction: &[f64],
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty frequency grid".into()));
    }
    if direction.len() != measure.dim() {
        return Err(Error::DimensionMismatch { expected: measure.dim(), found: direction.len() });
    }
    let n = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::InvalidParameter("zero probe direction".into()));
    }
    let (lo, hi) = annulus_bounds(r);
    let scale = 2f64.powi(r);
    let mut sup: f64 = 0.0;
    for &s in grid {
        let point: Vec<f64> = direction.iter().map(|d| d / n * s * scale).collect();
        let (re, im) = measure.shell_char_fn(lo, hi, &point)?;
        sup = sup.max(re.hypot(im));
    }
    Ok(sup)
}

/// Cramér constant on `|s| >= δ` obtained from one on `|s| >= ρ`:
/// `1 - (1-γ)δ²/(ρ+1)²`.
pub fn cramer_amplify(rho: f64, gamma: f64, delta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} outside (0, 1)")));
    }
    if !(rho > 0.0 && delta > 0.0 && delta < rho.min(1.0)) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < delta < min(rho, 1), got delta={delta}, rho={rho}"
        )));
    }
    Ok(1.0 - (1.0 - gamma) * delta * delta / ((rho + 1.0) * (rho + 1.0)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SufficientCheck {
    pub holds: bool,
    /// Smallest ν-fraction seen among unions of Lebesgue fraction `>= a`.
    pub worst_nu_fraction: f64,
    pub worst_lebesgue_fraction: f64,
    pub unions_tested: usize,
}

struct Cell {
    lebesgue: f64,
    nu: f64,
}

/// Tries to falsify "Lebesgue fraction `>= a` implies ν-fraction `>= b`" on
/// annulus `r`, over random unions of radial-bin × direction-zone cells
/// plus the greedy union of the cells with the smallest ν/Lebesgue ratio.
pub fn sufficient_condition_check(
    measure: &dyn LevyMeasure,
    r: i32,
    a: f64,
    b: f64,
    n_cells: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<SufficientCheck> {
    if !(a > 0.0 && a <= 1.0 && b > 0.0 && b < 1.0) {
        return Err(Error::InvalidParameter(format!("fractions a={a}, b={b} out of range")));
    }
    let q = measure.dim();
    let (lo, hi) = annulus_bounds(r);
    let total = measure.shell_mass(lo, hi);
    if total <= 0.0 {
        return Err(Error::InvalidParameter(format!("annulus {r} carries no mass")));
    }
    let n_cells = n_cells.max(1);
    let radial = ((n_cells as f64).sqrt().floor() as usize).max(1);
    let zones = if q == 1 { 2 } else { (n_cells / radial).max(1) };
    let bounds: Vec<f64> = (0..=zones)
        .map(|i| match i {
            0 => -1.0,
            i if i == zones => 1.0,
            i => first_coordinate_quantile(q, i as f64 / zones as f64),
        })
        .collect();
    let shell_volume = hi.powi(q as i32) - lo.powi(q as i32);
    let mut cells = Vec::with_capacity(radial * zones);
    for i in 0..radial {
        let r_lo = lo + (hi - lo) * i as f64 / radial as f64;
        let r_hi = lo + (hi - lo) * (i + 1) as f64 / radial as f64;
        let radial_frac = (r_hi.powi(q as i32) - r_lo.powi(q as i32)) / shell_volume;
        for z in 0..zones {
            cells.push(Cell {
                lebesgue: radial_frac / zones as f64,
                nu: measure.mass_in_region(r_lo, r_hi, bounds[z], bounds[z + 1]) / total,
            });
        }
    }

    let mut worst = (f64::INFINITY, 0.0);
    let mut tested = 0;
    let mut examine = |order: &[usize]| {
        let (mut leb, mut nu) = (0.0, 0.0);
        for &k in order {
            leb += cells[k].lebesgue;
            nu += cells[k].nu;
            if leb >= a - 1e-12 {
                break;
            }
        }
        tested += 1;
        if nu < worst.0 {
            worst = (nu, leb);
        }
    };

    let mut greedy: Vec<usize> = (0..cells.len()).collect();
    greedy.sort_by(|&i, &j| {
        (cells[i].nu / cells[i].lebesgue).total_cmp(&(cells[j].nu / cells[j].lebesgue))
    });
    examine(&greedy);
    let mut order: Vec<usize> = (0..cells.len()).collect();
    for _ in 0..trials {
        order.shuffle(rng);
        examine(&order);
    }
    Ok(SufficientCheck {
        holds: worst.0 >= b - 1e-12,
        worst_nu_fraction: worst.0,
        worst_lebesgue_fraction: worst.1,
        unions_tested: tested,
    })
}
