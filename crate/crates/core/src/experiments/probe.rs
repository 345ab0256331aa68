//! Cramér-condition probes on rescaled annuli and the cell-union check.

use super::config::ExperimentConfig;
use super::{num, Report, Table};
use crate::levy::{cramer_probe, probe_grid, sufficient_condition_check};
use crate::sampling::{purpose, RngStream};
use crate::wasserstein::slicing_directions;
use crate::Result;

const COLUMNS: &[&str] = &[
    "kind", "r", "direction", "sup_abs_cf", "holds", "worst_nu_fraction", "worst_lebesgue_fraction", "unions_tested",
];

pub fn run_probe_cramer(cfg: &ExperimentConfig) -> Result<Report> {
    let measure = cfg.measure.build()?;
    let p = &cfg.probe;
    let grid = probe_grid(p.rho, p.rho_max, p.points);
    let directions = slicing_directions(measure.dim(), p.directions);
    let mut table = Table::new(COLUMNS);
    let mut notes = Vec::new();
    for &r in &p.annuli {
        let mut worst: f64 = 0.0;
        for (k, dir) in directions.iter().enumerate() {
            let sup = cramer_probe(&*measure, r, &grid, dir)?;
            worst = worst.max(sup);
            table.push(&[("kind", "cf".into()), ("r", r.to_string()), ("direction", k.to_string()), ("sup_abs_cf", num(sup))]);
        }
        if worst >= 1.0 - 1e-9 {
            notes.push(format!("annulus {r}: |characteristic function| reaches 1, Cramér's condition fails"));
        }
        let mut rng = RngStream::for_task(cfg.master_seed, 0, r as u64, purpose::PROBE);
        match sufficient_condition_check(&*measure, r, p.a, p.b, p.cells, p.trials, &mut rng) {
            Ok(chk) => table.push(&[
                ("kind", "sufficient".into()),
                ("r", r.to_string()),
                ("holds", chk.holds.to_string()),
                ("worst_nu_fraction", num(chk.worst_nu_fraction)),
                ("worst_lebesgue_fraction", num(chk.worst_lebesgue_fraction)),
                ("unions_tested", chk.unions_tested.to_string()),
            ]),
            Err(e) => notes.push(format!("annulus {r}: {e}")),
        }
    }
    Ok(Report { table, fit: None, notes })
}
