//! Text dump of the Edgeworth and perturbation pipeline for one cumulant set.

use std::fmt::Write;

use super::config::ExperimentConfig;
use crate::edgeworth::{build_p, build_q, moment_comparison, CumulantSet, MomentComparison};
use crate::perturbation::{perturbation_from_cumulants, GradientPolyMap};
use crate::polycore::{parse_rational, Coeff, Polynomial, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BuildReport<C: Coeff> {
    pub p: Vec<Polynomial<C>>,
    pub q: Vec<Polynomial<C>>,
    pub map: GradientPolyMap<C>,
    pub residuals: Vec<Polynomial<C>>,
    pub curl_free: bool,
    pub moments: Vec<MomentComparison<C>>,
    pub moment_eps: C,
}

impl<C: Coeff> BuildReport<C> {
    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(|r| r.is_negligible(1e-9))
    }

    pub fn moments_match(&self) -> bool {
        self.moments.iter().all(|m| {
            let (a, b) = (m.expansion.to_f64(), m.sum.to_f64());
            m.matches() || (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
        })
    }

    pub fn render(&self, numeric: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# edgeworth-build ({} mode)", if numeric { "numeric" } else { "exact" });
        let _ = writeln!(s, "dimension {}", self.map.dim());
        let _ = writeln!(s, "levels {}", self.map.order());
        let section = |s: &mut String, name: &str, polys: &[Polynomial<C>]| {
            for (k, p) in polys.iter().enumerate() {
                let _ = writeln!(s, "{name}_{} = {}", k + 1, p.render());
            }
        };
        section(&mut s, "P", &self.p);
        section(&mut s, "Q", &self.q);
        section(&mut s, "u", self.map.potentials());
        for (k, field) in self.map.gradients().iter().enumerate() {
            for (j, c) in field.iter().enumerate() {
                let _ = writeln!(s, "p_{}[{}] = {}", k + 1, j + 1, c.render());
            }
        }
        for (k, r) in self.residuals.iter().enumerate() {
            let status = if r.is_zero() { "zero".to_string() } else { format!("NONZERO {}", r.render()) };
            let _ = writeln!(s, "residual_{} {status}", k + 1);
        }
        let _ = writeln!(s, "curl_free {}", self.curl_free);
        let _ = writeln!(s, "moment_match eps={}", self.moment_eps.render());
        for m in &self.moments {
            let _ = writeln!(
                s,
                "moment {} expansion={} sum={} {}",
                m.alpha,
                m.expansion.render(),
                m.sum.render(),
                if m.matches() { "match" } else { "MISMATCH" }
            );
        }
        s
    }
}

/// Runs `P_k`, `Q_k`, the inverse map and both self-checks for `levels`
/// correction levels.
pub fn edgeworth_build<C: Coeff>(c: &CumulantSet<C>, levels: usize, moment_eps: C) -> Result<BuildReport<C>> {
    let needed = levels as u32 + 2;
    if c.order() < needed {
        return Err(Error::InsufficientOrder { needed: needed as usize, have: c.order() as usize });
    }
    let map = perturbation_from_cumulants(c, levels)?;
    Ok(BuildReport {
        p: build_p(c, levels)?,
        q: build_q(c, levels)?,
        residuals: map.pde_residuals()?,
        curl_free: map.is_curl_free(),
        moments: moment_comparison(c, &moment_eps)?,
        map,
        moment_eps,
    })
}

pub fn run_edgeworth_build(cfg: &ExperimentConfig) -> Result<String> {
    let b = &cfg.build;
    let text = match (&b.cumulants, &b.cumulants_text) {
        (Some(path), _) => {
            let full = cfg.base_dir.join(path);
            std::fs::read_to_string(&full).map_err(|e| Error::Config(format!("cannot read {}: {e}", full.display())))?
        }
        (None, Some(t)) => t.clone(),
        (None, None) => return Err(Error::Config("no cumulants given".into())),
    };
    let c = CumulantSet::<Rational>::parse(&text)?;
    let eps = parse_rational(&b.moment_eps)
        .ok_or_else(|| Error::Config(format!("moment_eps '{}' is not a rational", b.moment_eps)))?;
    match edgeworth_build(&c, b.order, eps.clone()) {
        Ok(r) => Ok(r.render(false)),
        Err(Error::ExactNeedsDiagonal) => Ok(edgeworth_build(&c.to_f64(), b.order, eps.to_f64())?.render(true)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, order: usize) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            "experiment = \"edgeworth-build\"\n[build]\norder = {order}\ncumulants_text = \"\"\"\n{text}\"\"\"\n"
        ))
        .unwrap()
    }

    #[test]
    fn gaussian_cumulants_dump_zeros() {
        let out = run_edgeworth_build(&cfg("# order 4\n2 0 1\n0 2 1\n", 2)).unwrap();
        for line in out.lines().filter(|l| l.starts_with(['P', 'Q', 'u', 'p'])) {
            assert!(line.ends_with("= 0"), "{line}");
        }
        assert!(!out.contains("NONZERO") && !out.contains("MISMATCH"));
    }

    #[test]
    fn exact_residuals_and_moments() {
        let out = run_edgeworth_build(&cfg("2 1\n3 2/3\n4 -1/5\n5 7\n", 2)).unwrap();
        assert!(out.contains("residual_1 zero") && out.contains("residual_2 zero"), "{out}");
        assert!(out.contains("moment (5) ") && !out.contains("MISMATCH"), "{out}");
    }

    #[test]
    fn rotated_covariance_falls_back_to_numeric() {
        let out = run_edgeworth_build(&cfg("2 0 2\n1 1 1\n0 2 2\n3 0 1\n", 1)).unwrap();
        assert!(out.starts_with("# edgeworth-build (numeric mode)"), "{out}");
    }

    #[test]
    fn missing_order_is_reported() {
        assert!(matches!(
            run_edgeworth_build(&cfg("2 1\n3 1\n", 2)),
            Err(Error::InsufficientOrder { .. })
        ));
    }
}
