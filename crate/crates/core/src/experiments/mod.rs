//! Named experiments: configuration, built-in test laws, and runners that
//! produce CSV-ready tables (or a text dump for `edgeworth-build`).

mod build;
mod clt;
pub mod config;
mod jump;
pub mod laws;
mod probe;
mod sde_rate;

pub use build::{edgeworth_build, run_edgeworth_build, BuildReport};
pub use clt::run_clt_rate;
pub use config::{ExperimentConfig, ExperimentKind};
pub use jump::run_jump_coupling;
pub use laws::{gamma_quantile, probit, TestLaw};
pub use probe::run_probe_cramer;
pub use sde_rate::run_sde_convergence;

use crate::sampling::{purpose, RngStream};
use crate::wasserstein::{optimal_assignment, rate_fit_replicates, wp_1d_samples, Aggregate, EmpiricalDistribution, RateFit};
use crate::Result;

/// Rows of strings under fixed column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    /// Appends a row given as `(column, value)` pairs; other cells stay empty.
    pub fn push(&mut self, cells: &[(&str, String)]) {
        let mut row = vec![String::new(); self.columns.len()];
        for (name, value) in cells {
            let i = self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("unknown column {name}"));
            row[i] = value.clone();
        }
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub table: Table,
    /// The main log-log slope fit, when one could be made.
    pub fit: Option<RateFit>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Table(Report),
    Text(String),
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        ExperimentKind::CltRate => Output::Table(run_clt_rate(cfg)?),
        ExperimentKind::JumpCoupling => Output::Table(run_jump_coupling(cfg)?),
        ExperimentKind::SdeConvergence => Output::Table(run_sde_convergence(cfg)?),
        ExperimentKind::ProbeCramer => Output::Table(run_probe_cramer(cfg)?),
        ExperimentKind::EdgeworthBuild => Output::Text(run_edgeworth_build(cfg)?),
    })
}

pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

/// Distance between equal-size clouds: sorted matching in 1D, certified
/// assignment otherwise. The second value is the certificate column.
pub(crate) fn cloud_distance(a: &[Vec<f64>], b: &[Vec<f64>], p: f64) -> Result<(f64, String)> {
    if a.first().map_or(1, Vec::len) == 1 {
        let xs: Vec<f64> = a.iter().map(|v| v[0]).collect();
        let ys: Vec<f64> = b.iter().map(|v| v[0]).collect();
        return Ok((wp_1d_samples(&xs, &ys, p)?, "exact-1d".into()));
    }
    let (ea, eb) = (EmpiricalDistribution::from_points(a)?, EmpiricalDistribution::from_points(b)?);
    let asg = optimal_assignment(&ea, &eb, p)?;
    Ok(((asg.total_cost.max(0.0) / a.len() as f64).powf(1.0 / p), asg.certified.to_string()))
}

/// Bootstrap slope fit of `values[i][rep]` against `xs`, or a note saying
/// why no fit was possible.
pub(crate) fn fit_or_note(
    cfg: &ExperimentConfig,
    xs: &[f64],
    values: &[Vec<f64>],
    aggregate: Aggregate,
    label: &str,
    notes: &mut Vec<String>,
) -> Option<RateFit> {
    if values.iter().flatten().all(|&v| v == 0.0) {
        notes.push(format!("{label}: all values are zero, no slope"));
        return None;
    }
    let mut rng = RngStream::for_task(cfg.master_seed, 0, 0, purpose::BOOTSTRAP);
    match rate_fit_replicates(xs, values, aggregate, cfg.sweep.bootstrap, cfg.sweep.confidence, &mut rng) {
        Ok(f) => Some(f),
        Err(e) => {
            notes.push(format!("{label}: no slope ({e})"));
            None
        }
    }
}

pub(crate) fn push_fit(table: &mut Table, kind: &str, fit: &RateFit, extra: &[(&str, String)]) {
    let mut cells = vec![
        ("kind", kind.to_string()),
        ("slope", num(fit.slope)),
        ("ci_low", num(fit.ci_low)),
        ("ci_high", num(fit.ci_high)),
    ];
    cells.extend(extra.iter().cloned());
    table.push(&cells);
}
