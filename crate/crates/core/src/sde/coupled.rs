//! Two schemes on shared randomness: a fine-grid Euler reference driven by
//! simulated small jumps, and the coarse scheme with the small jumps
//! replaced by Gaussian or perturbed-normal draws. Per step, the small-jump
//! sums of the batch are paired with the surrogate draws of the batch.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scheme::{Drivers, Path};
use super::{add_scaled, sum_vectors, SchemeConfig, SdeSpec, StreamKey};
use crate::sampling::IncrementMode;
use crate::wasserstein::{optimal_assignment, EmpiricalDistribution, MAX_POINTS};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledPaths {
    pub exact: Vec<Path>,
    pub approx: Vec<Path>,
    /// `max_k |X_k - X̄_k|` per replicate.
    pub sup_distance: Vec<f64>,
    /// Coarse increments of the reference driver, `[replicate][step]`.
    pub exact_increments: Vec<Vec<Vec<f64>>>,
    /// Every per-step assignment passed its optimality certificate.
    pub certified: bool,
}

/// Per-step pairing of the batch's small-jump sums with surrogate draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// Exact optimal assignment under squared distance.
    Assignment,
    /// Keeps each sum's direction and gives it the surrogate radius of the
    /// same rank. Optimal between rotation-invariant laws and exact in law
    /// for them; rejected for measures that are not rotation invariant.
    Radial,
}

struct StepDraws {
    brownian: Vec<Vec<f64>>,
    small: Vec<Vec<f64>>,
    small_sum: Vec<f64>,
    big: Vec<f64>,
    surrogate: Vec<f64>,
}

/// Runs replicates `0..batch` of `master_seed` in lockstep.
pub fn coupled_paths(spec: &SdeSpec, cfg: &SchemeConfig, batch: usize, master_seed: u64) -> Result<CoupledPaths> {
    let Some(coupling) = cfg.coupling else {
        return Err(Error::InvalidParameter("coupled_paths needs a coupling".into()));
    };
    if coupling == Coupling::Radial && !spec.measure.is_rotation_invariant() {
        return Err(Error::InvalidParameter("radial coupling needs a rotation-invariant measure".into()));
    }
    if cfg.mode == IncrementMode::Exact {
        return Err(Error::InvalidParameter("coupling pairs simulated jumps with a surrogate mode".into()));
    }
    if !(2..=MAX_POINTS).contains(&batch) {
        return Err(Error::InvalidParameter(format!("batch size {batch} outside 2..={MAX_POINTS}")));
    }
    let drivers = Drivers::new(spec, cfg, true)?;
    let (d, q) = (spec.d(), spec.q());
    let n = cfg.steps(spec.horizon);
    let h = cfg.h;
    let dt = h / cfg.fine_steps as f64;
    let keys: Vec<StreamKey> = (0..batch as u64).map(|r| StreamKey::new(master_seed, r)).collect();

    let mut x: Vec<Vec<f64>> = vec![spec.x0.clone(); batch];
    let mut xbar = x.clone();
    let mut exact: Vec<Path> = x.iter().map(|s| Path { times: vec![0.0], states: vec![s.clone()] }).collect();
    let mut approx = exact.clone();
    let mut sup = vec![0.0f64; batch];
    let mut increments = vec![Vec::with_capacity(n); batch];
    let mut certified = true;

    for k in 0..n {
        let draws: Vec<StepDraws> = keys
            .par_iter()
            .map(|key| {
                let small = drivers.small_jumps_fine(key, k);
                StepDraws {
                    brownian: drivers.brownian(key, k),
                    small_sum: sum_vectors(&small, q),
                    small,
                    big: drivers.big_jumps(key, k),
                    surrogate: drivers.surrogate(key, k, cfg.mode),
                }
            })
            .collect();
        let matched = match coupling {
            Coupling::Assignment => {
                let sums = EmpiricalDistribution::new(q, draws.iter().flat_map(|s| s.small_sum.clone()).collect())?;
                let surrogates =
                    EmpiricalDistribution::new(q, draws.iter().flat_map(|s| s.surrogate.clone()).collect())?;
                let assignment = optimal_assignment(&sums, &surrogates, 2.0)?;
                certified &= assignment.certified;
                assignment.row_to_col.iter().map(|&j| draws[j].surrogate.clone()).collect()
            }
            Coupling::Radial => radial_match(&draws),
        };

        let stepped: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = (0..batch)
            .into_par_iter()
            .map(|i| {
                let dr = &draws[i];
                let mut buf = vec![0.0; d * q];
                let mut xi = x[i].clone();
                for (dw, z) in dr.brownian.iter().zip(&dr.small) {
                    let mut dz: Vec<f64> = drivers.drift_bar.iter().map(|a| a * dt).collect();
                    add_scaled(&mut dz, &drivers.diffuse(dw), 1.0);
                    add_scaled(&mut dz, z, 1.0);
                    let at = xi.clone();
                    spec.sigma.apply(&at, &dz, &mut xi, &mut buf);
                }
                let at = xi.clone();
                spec.sigma.apply(&at, &dr.big, &mut xi, &mut buf);

                let dw = sum_vectors(&dr.brownian, drivers.width);
                let mut common: Vec<f64> = drivers.drift_bar.iter().map(|a| a * h).collect();
                add_scaled(&mut common, &drivers.diffuse(&dw), 1.0);
                add_scaled(&mut common, &dr.big, 1.0);
                let mut dzbar = common.clone();
                add_scaled(&mut dzbar, &matched[i], 1.0);
                let mut xb = xbar[i].clone();
                let at = xb.clone();
                spec.sigma.apply(&at, &dzbar, &mut xb, &mut buf);

                add_scaled(&mut common, &dr.small_sum, 1.0);
                (xi, xb, common)
            })
            .collect();

        let t = (k + 1) as f64 * h;
        for (i, (xi, xb, inc)) in stepped.into_iter().enumerate() {
            let dist = xi.iter().zip(&xb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            sup[i] = sup[i].max(dist);
            exact[i].times.push(t);
            exact[i].states.push(xi.clone());
            approx[i].times.push(t);
            approx[i].states.push(xb.clone());
            increments[i].push(inc);
            x[i] = xi;
            xbar[i] = xb;
        }
    }
    Ok(CoupledPaths { exact, approx, sup_distance: sup, exact_increments: increments, certified })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn radial_match(draws: &[StepDraws]) -> Vec<Vec<f64>> {
    let radius = |v: &Vec<f64>| norm(v);
    let mut by_sum: Vec<usize> = (0..draws.len()).collect();
    by_sum.sort_by(|&a, &b| radius(&draws[a].small_sum).total_cmp(&radius(&draws[b].small_sum)).then(a.cmp(&b)));
    let mut by_surrogate: Vec<usize> = (0..draws.len()).collect();
    by_surrogate
        .sort_by(|&a, &b| radius(&draws[a].surrogate).total_cmp(&radius(&draws[b].surrogate)).then(a.cmp(&b)));
    let mut out = vec![Vec::new(); draws.len()];
    for (&i, &j) in by_sum.iter().zip(&by_surrogate) {
        let (s, g) = (&draws[i].small_sum, &draws[j].surrogate);
        let (rs, rg) = (norm(s), norm(g));
        out[i] = if rs > 0.0 { s.iter().map(|x| x * rg / rs).collect() } else { g.clone() };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{AtomicMeasure, LevyMeasure, RadialMeasure, TailPolicy};
    use crate::polycore::Matrix;
    use crate::sde::SigmaFn;
    use std::sync::Arc;

    fn stable() -> Arc<dyn LevyMeasure> {
        Arc::new(RadialMeasure::stable_like(2, 1.5, 1.0).unwrap())
    }

    fn cfg(h: f64) -> SchemeConfig {
        let mut c = SchemeConfig::new(h, h, IncrementMode::Gaussianized);
        c.coupling = Some(Coupling::Assignment);
        c.small_jumps.depth = Some(3);
        c.small_jumps.tail = TailPolicy::Gaussian;
        c
    }

    #[test]
    fn no_jumps_means_identical_paths() {
        let s = SdeSpec {
            drift: vec![0.3, -0.1],
            diffusion: Matrix::identity(2),
            measure: Arc::new(AtomicMeasure::null(2)),
            sigma: SigmaFn::constant(Matrix::from_rows(vec![vec![1.0, 0.5], vec![0.0, 2.0]])),
            x0: vec![0.0, 0.0],
            horizon: 1.0,
        };
        let out = coupled_paths(&s, &cfg(0.125), 16, 4).unwrap();
        assert!(out.sup_distance.iter().all(|&v| v < 1e-12), "{:?}", out.sup_distance);
    }

    #[test]
    fn constant_sigma_telescopes() {
        let sig = Matrix::from_rows(vec![vec![1.0, 0.5], vec![-0.3, 2.0]]);
        let s = SdeSpec {
            drift: vec![0.0, 0.0],
            diffusion: Matrix::identity(2),
            measure: stable(),
            sigma: SigmaFn::constant(sig.clone()),
            x0: vec![1.0, 1.0],
            horizon: 0.5,
        };
        let c = cfg(0.125);
        let out = coupled_paths(&s, &c, 24, 8).unwrap();
        assert!(out.certified);
        // X - X̄ = σ Σ_k (small-jump sum - matched surrogate), rebuilt from streams
        let drivers = Drivers::new(&s, &c, true).unwrap();
        let keys: Vec<StreamKey> = (0..24).map(|r| StreamKey::new(8, r)).collect();
        let mut diff = vec![vec![0.0; 2]; 24];
        for k in 0..4 {
            let sums: Vec<Vec<f64>> = keys.iter().map(|key| sum_vectors(&drivers.small_jumps_fine(key, k), 2)).collect();
            let gs: Vec<Vec<f64>> = keys.iter().map(|key| drivers.surrogate(key, k, c.mode)).collect();
            let a = EmpiricalDistribution::from_points(&sums).unwrap();
            let b = EmpiricalDistribution::from_points(&gs).unwrap();
            let asg = optimal_assignment(&a, &b, 2.0).unwrap();
            for i in 0..24 {
                add_scaled(&mut diff[i], &sums[i], 1.0);
                add_scaled(&mut diff[i], &gs[asg.row_to_col[i]], -1.0);
            }
        }
        for i in 0..24 {
            let want = sig.mul_vec(&diff[i]);
            let got: Vec<f64> = out.exact[i].states[4].iter().zip(&out.approx[i].states[4]).map(|(a, b)| a - b).collect();
            for j in 0..2 {
                assert!((got[j] - want[j]).abs() < 1e-10, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn error_shrinks_with_eps() {
        let s = SdeSpec {
            drift: vec![0.0, 0.0],
            diffusion: Matrix::identity(2),
            measure: stable(),
            sigma: SigmaFn::inverse_quadratic(2),
            x0: vec![0.0, 0.0],
            horizon: 1.0,
        };
        let rms: Vec<f64> = [0.25, 0.0625, 1.0 / 64.0]
            .iter()
            .map(|&eps| {
                let mut c = cfg(0.125);
                c.eps = eps;
                let out = coupled_paths(&s, &c, 64, 1).unwrap();
                (out.sup_distance.iter().map(|v| v * v).sum::<f64>() / 64.0).sqrt()
            })
            .collect();
        assert!(rms[0] > rms[1] && rms[1] > rms[2], "{rms:?}");
    }

    #[test]
    fn rejects_bad_configs() {
        let s = SdeSpec {
            drift: vec![0.0],
            diffusion: Matrix::identity(1),
            measure: Arc::new(AtomicMeasure::null(1)),
            sigma: SigmaFn::trig(1),
            x0: vec![0.0],
            horizon: 1.0,
        };
        let mut c = cfg(0.25);
        assert!(coupled_paths(&s, &c, 1, 0).is_err());
        c.coupling = None;
        assert!(coupled_paths(&s, &c, 8, 0).is_err());
    }
}
