//! Distance between the normalized sum and its Gaussian or perturbed-normal
//! approximation, swept over the number of summands.

use rayon::prelude::*;

use super::config::{CltMode, ExperimentConfig, Pairing};
use super::laws::{probit, TestLaw};
use super::{cloud_distance, fit_or_note, num, push_fit, Report, Table};
use crate::perturbation::perturbation_from_cumulants;
use crate::polycore::Coeff;
use crate::sampling::{purpose, GaussianSampler, PerturbedNormalSampler, RngStream};
use crate::wasserstein::Aggregate;
use crate::Result;

const COLUMNS: &[&str] = &[
    "kind", "law", "m", "p", "mode", "replicate", "distance", "certified", "slope", "ci_low", "ci_high", "note",
];

struct Reference {
    gaussian: GaussianSampler,
    sd: f64,
    perturbed: Option<PerturbedNormalSampler>,
}

impl Reference {
    fn apply(&self, eps: f64, xi: Vec<f64>) -> Vec<f64> {
        match &self.perturbed {
            Some(s) => s.transform(eps, &xi),
            None => xi,
        }
    }
}

fn clouds(
    law: TestLaw,
    m: u64,
    n: usize,
    pairing: Pairing,
    reference: &Reference,
    seed: u64,
    rep: u64,
    step: u64,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let eps = 1.0 / (m as f64).sqrt();
    let mut rng = RngStream::for_task(seed, rep, step, purpose::SAMPLE);
    match pairing {
        Pairing::CommonUniform => {
            let mut ys = Vec::with_capacity(n);
            let mut refs = Vec::with_capacity(n);
            for _ in 0..n {
                let u = rng.uniform();
                ys.push(vec![law.normalized_sum_quantile(m, u)?]);
                refs.push(reference.apply(eps, vec![reference.sd * probit(u)]));
            }
            Ok((ys, refs))
        }
        Pairing::Independent => {
            let ys = (0..n).map(|_| law.sample_normalized_sum(m, &mut rng)).collect();
            let mut rr = RngStream::for_task(seed, rep, step, purpose::REFERENCE);
            let refs = (0..n).map(|_| reference.apply(eps, reference.gaussian.sample(&mut rr))).collect();
            Ok((ys, refs))
        }
    }
}

pub fn run_clt_rate(cfg: &ExperimentConfig) -> Result<Report> {
    let c = &cfg.clt;
    let ms = cfg.m_values()?;
    let (p, n, reps) = (cfg.sweep.p as f64, cfg.sweep.n_samples, cfg.sweep.replicates as u64);
    let cumulants = c.law.cumulants(c.order)?;
    let corrections = match c.mode {
        CltMode::Gaussian => 0,
        CltMode::Perturbed => c.order as usize - 3,
    };
    let perturbed = if corrections > 0 {
        let map = perturbation_from_cumulants(&cumulants, corrections)?;
        Some(PerturbedNormalSampler::new(&map, corrections)?)
    } else {
        None
    };
    let sigma = cumulants.covariance();
    let reference = Reference { gaussian: GaussianSampler::new(sigma)?, sd: sigma.get(0, 0).to_f64().sqrt(), perturbed };
    let mode = match c.mode {
        CltMode::Gaussian => "gaussian",
        CltMode::Perturbed => "perturbed",
    };
    let law = format!("{:?}", c.law).to_lowercase();

    let mut table = Table::new(COLUMNS);
    let mut values = Vec::with_capacity(ms.len());
    for (step, &m) in ms.iter().enumerate() {
        let results: Vec<Result<(f64, String)>> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let (ys, refs) = clouds(c.law, m, n, c.pairing(), &reference, cfg.master_seed, rep, step as u64)?;
                cloud_distance(&ys, &refs, p)
            })
            .collect();
        let mut row = Vec::with_capacity(reps as usize);
        for (rep, res) in results.into_iter().enumerate() {
            let (d, cert) = res?;
            table.push(&[
                ("kind", "distance".into()),
                ("law", law.clone()),
                ("m", m.to_string()),
                ("p", cfg.sweep.p.to_string()),
                ("mode", mode.into()),
                ("replicate", rep.to_string()),
                ("distance", num(d)),
                ("certified", cert),
            ]);
            row.push(d);
        }
        values.push(row);
    }
    let xs: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let mut notes = Vec::new();
    let null_case = c.law == TestLaw::Gaussian && c.mode == CltMode::Gaussian;
    if null_case {
        notes.push("null case: the normalized sum is exactly Gaussian".into());
    }
    let fit = fit_or_note(cfg, &xs, &values, Aggregate::Mean, "distance", &mut notes);
    if let Some(f) = &fit {
        let note = if null_case { "null-case" } else { "" };
        push_fit(&mut table, "fit", f, &[("law", law), ("p", cfg.sweep.p.to_string()), ("mode", mode.into()), ("note", note.into())]);
    }
    Ok(Report { table, fit, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!("experiment = \"clt-rate\"\nmaster_seed = 5\n{extra}")).unwrap()
    }

    #[test]
    fn gaussian_law_with_common_uniforms_is_exactly_null() {
        let r = run_clt_rate(&cfg("[clt]\nlaw = \"gaussian\"\n[sweep]\nm = [1, 4, 16]\nn_samples = 200\nreplicates = 2\n")).unwrap();
        assert!(r.fit.is_none());
        let col = r.table.column("distance").unwrap();
        assert!(r.table.rows.iter().all(|row| row[col] == "0"));
        assert!(r.notes.iter().any(|n| n.contains("null case")));
    }

    #[test]
    fn gaussian_null_case_with_independent_clouds_is_flagged() {
        let r = run_clt_rate(&cfg(
            "[clt]\nlaw = \"gaussian\"\npairing = \"independent\"\n[sweep]\nm = [1, 4, 16]\nn_samples = 400\nreplicates = 3\nbootstrap = 50\n",
        ))
        .unwrap();
        let last = r.table.rows.last().unwrap();
        assert_eq!(last[0], "fit");
        assert_eq!(last[r.table.column("note").unwrap()], "null-case");
    }

    #[test]
    fn exponential_distances_shrink_with_m() {
        let r = run_clt_rate(&cfg("[sweep]\nm = [4, 64, 1024]\nn_samples = 20000\nreplicates = 2\nbootstrap = 0\n")).unwrap();
        let f = r.fit.unwrap();
        assert!((f.slope + 0.5).abs() < 0.15, "{f:?}");
    }

    #[test]
    fn disk_law_uses_certified_assignment() {
        let r = run_clt_rate(&cfg("[clt]\nlaw = \"disk-uniform\"\n[sweep]\nm = [2, 8, 32]\nn_samples = 64\nreplicates = 2\nbootstrap = 10\n"))
            .unwrap();
        let col = r.table.column("certified").unwrap();
        assert!(r.table.rows.iter().filter(|row| row[0] == "distance").all(|row| row[col] == "true"));
    }

    #[test]
    fn reruns_are_identical() {
        let c = cfg("[clt]\nmode = \"perturbed\"\n[sweep]\nm = [4, 16, 64]\nn_samples = 500\nreplicates = 2\nbootstrap = 20\n");
        assert_eq!(run_clt_rate(&c).unwrap(), run_clt_rate(&c).unwrap());
    }
}
