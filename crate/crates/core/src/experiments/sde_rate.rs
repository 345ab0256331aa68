//! Strong error of the coarse scheme against the fine reference, swept over
//! `h` with `ε = h`.

use super::config::{ExperimentConfig, SigmaKind};
use super::{fit_or_note, num, push_fit, Report, Table};
use crate::polycore::Matrix;
use crate::sampling::SmallJumpConfig;
use crate::sde::{coupled_paths, SchemeConfig, SdeSpec, SigmaFn};
use crate::wasserstein::Aggregate;
use crate::{Error, Result};

const COLUMNS: &[&str] =
    &["kind", "h", "eps", "steps", "batch", "rms_sup_error", "max_sup_error", "certified", "slope", "ci_low", "ci_high", "note"];

pub(crate) fn build_spec(cfg: &ExperimentConfig) -> Result<SdeSpec> {
    let s = &cfg.sde;
    let measure = cfg.measure.build()?;
    let q = measure.dim();
    let sigma = match s.sigma {
        SigmaKind::Zero => SigmaFn::zero(q, q),
        SigmaKind::InverseQuadratic => SigmaFn::inverse_quadratic(q),
        SigmaKind::Trig => SigmaFn::trig(q),
        SigmaKind::Constant => {
            let rows = s.sigma_matrix.clone().ok_or_else(|| Error::Config("constant sigma needs sigma_matrix".into()))?;
            SigmaFn::constant(Matrix::from_rows(rows))
        }
    };
    let d = sigma.d();
    let spec = SdeSpec {
        drift: s.drift.clone().unwrap_or_else(|| vec![0.0; q]),
        diffusion: s.diffusion.clone().map(Matrix::from_rows).unwrap_or_else(|| Matrix::identity(q)),
        measure,
        sigma,
        x0: s.x0.clone().unwrap_or_else(|| vec![0.0; d]),
        horizon: s.horizon,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn run_sde_convergence(cfg: &ExperimentConfig) -> Result<Report> {
    let spec = build_spec(cfg)?;
    let hs = cfg.h_values()?;
    let batch = cfg.sweep.replicates;
    let s = &cfg.sde;
    let mut table = Table::new(COLUMNS);
    let mut values = Vec::with_capacity(hs.len());
    for &h in &hs {
        let mut scheme = SchemeConfig::new(h, h, s.mode);
        scheme.coupling = Some(s.coupling);
        scheme.small_jumps = SmallJumpConfig { depth: s.depth, tail: s.tail, ..SmallJumpConfig::default() };
        scheme.fine_steps = s.fine_steps;
        scheme.validate()?;
        let out = coupled_paths(&spec, &scheme, batch, cfg.master_seed)?;
        let rms = (out.sup_distance.iter().map(|v| v * v).sum::<f64>() / batch as f64).sqrt();
        let max = out.sup_distance.iter().copied().fold(0.0, f64::max);
        table.push(&[
            ("kind", "rms".into()),
            ("h", num(h)),
            ("eps", num(h)),
            ("steps", scheme.steps(spec.horizon).to_string()),
            ("batch", batch.to_string()),
            ("rms_sup_error", num(rms)),
            ("max_sup_error", num(max)),
            ("certified", out.certified.to_string()),
        ]);
        values.push(out.sup_distance);
    }
    let mut notes = Vec::new();
    let fit = fit_or_note(cfg, &hs, &values, Aggregate::RootMeanSquare, "rms sup error", &mut notes);
    if let Some(f) = &fit {
        push_fit(&mut table, "fit", f, &[]);
    }
    Ok(Report { table, fit, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            "experiment = \"sde-convergence\"\n[sweep]\nh = [0.25, 0.125, 0.0625]\nreplicates = 16\nbootstrap = 10\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn zero_sigma_has_zero_error() {
        let r = run_sde_convergence(&cfg("[sde]\nsigma = \"zero\"\n")).unwrap();
        let c = r.table.column("rms_sup_error").unwrap();
        assert!(r.table.rows.iter().all(|row| row[c] == "0"));
        assert!(r.fit.is_none());
    }

    #[test]
    fn additive_noise_without_jumps_has_zero_error() {
        let r = run_sde_convergence(&cfg(
            "[measure]\nkind = \"null\"\n[sde]\nsigma = \"constant\"\nsigma_matrix = [[1.0, 0.2], [0.0, 0.5]]\ndrift = [0.1, 0.0]\n",
        ))
        .unwrap();
        let c = r.table.column("rms_sup_error").unwrap();
        for row in r.table.rows.iter().filter(|row| row[0] == "rms") {
            assert!(row[c].parse::<f64>().unwrap() < 1e-12);
        }
    }

    #[test]
    fn non_isotropic_measure_rejects_radial_coupling() {
        let c = cfg("[measure]\nkind = \"atoms\"\natoms = [{ z = [0.1, 0.0], weight = 2.0 }]\n");
        assert!(run_sde_convergence(&c).unwrap_err().is_config());
    }
}
