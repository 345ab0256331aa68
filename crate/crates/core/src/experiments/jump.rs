//! Distance between the small-jump part `Z_t^ε` and its Gaussian
//! counterpart `√t ξ_{Σ_ε}`, swept over ε.

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::{cloud_distance, fit_or_note, num, push_fit, Report, Table};
use crate::levy::small_jump_covariance;
use crate::sampling::{purpose, GaussianSampler, RngStream, SmallJumpConfig, SmallJumpSampler};
use crate::wasserstein::Aggregate;
use crate::Result;

const COLUMNS: &[&str] = &[
    "kind", "eps", "t", "p", "replicate", "distance", "null_distance", "certified", "relative_tail", "slope", "ci_low",
    "ci_high", "note",
];

pub fn run_jump_coupling(cfg: &ExperimentConfig) -> Result<Report> {
    let measure = cfg.measure.build()?;
    let eps_list = cfg.eps_values()?;
    let (p, n, reps) = (cfg.sweep.p as f64, cfg.sweep.n_samples, cfg.sweep.replicates as u64);
    let j = &cfg.jump;
    let small = SmallJumpConfig { depth: j.depth, tail: j.tail, tolerance: j.tolerance, ..SmallJumpConfig::default() };

    let mut table = Table::new(COLUMNS);
    let (mut values, mut nulls) = (Vec::new(), Vec::new());
    for (step, &eps) in eps_list.iter().enumerate() {
        let t = j.t.unwrap_or(eps);
        let decomposition = small.decompose(&*measure, eps)?;
        let relative_tail = decomposition.relative_tail();
        let sampler = SmallJumpSampler::new(&*measure, decomposition)?;
        let gaussian = GaussianSampler::new(&small_jump_covariance(&*measure, eps)?.matrix)?;
        let scale = t.sqrt();
        let draw_ref = |rng: &mut RngStream| -> Vec<f64> { gaussian.sample(rng).into_iter().map(|x| x * scale).collect() };
        let results: Vec<Result<(f64, String, Option<f64>)>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let seed = cfg.master_seed;
                let mut rz = RngStream::for_task(seed, rep, step as u64, purpose::SAMPLE);
                let z: Vec<Vec<f64>> = (0..n).map(|_| sampler.sample(t, &mut rz)).collect();
                let mut rg = RngStream::for_task(seed, rep, step as u64, purpose::REFERENCE);
                let g: Vec<Vec<f64>> = (0..n).map(|_| draw_ref(&mut rg)).collect();
                let (d, cert) = cloud_distance(&z, &g, p)?;
                let null = if j.null_reference {
                    let mut rn = RngStream::for_task(seed, rep, step as u64, purpose::NULL_REFERENCE);
                    let g2: Vec<Vec<f64>> = (0..n).map(|_| draw_ref(&mut rn)).collect();
                    Some(cloud_distance(&g2, &g, p)?.0)
                } else {
                    None
                };
                Ok((d, cert, null))
            })
            .collect();
        let (mut row, mut null_row) = (Vec::new(), Vec::new());
        for (rep, res) in results.into_iter().enumerate() {
            let (d, cert, null) = res?;
            table.push(&[
                ("kind", "distance".into()),
                ("eps", num(eps)),
                ("t", num(t)),
                ("p", cfg.sweep.p.to_string()),
                ("replicate", rep.to_string()),
                ("distance", num(d)),
                ("null_distance", null.map(num).unwrap_or_default()),
                ("certified", cert),
                ("relative_tail", num(relative_tail)),
            ]);
            row.push(d);
            null_row.extend(null);
        }
        values.push(row);
        nulls.push(null_row);
    }
    let mut notes = Vec::new();
    let fit = fit_or_note(cfg, &eps_list, &values, Aggregate::Mean, "distance", &mut notes);
    if let Some(f) = &fit {
        push_fit(&mut table, "fit", f, &[("p", cfg.sweep.p.to_string())]);
    }
    if j.null_reference {
        if let Some(f) = fit_or_note(cfg, &eps_list, &nulls, Aggregate::Mean, "null distance", &mut notes) {
            push_fit(&mut table, "fit-null", &f, &[("p", cfg.sweep.p.to_string()), ("note", "reference-vs-reference".into())]);
        }
    }
    Ok(Report { table, fit, notes })
}
