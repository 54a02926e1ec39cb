use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::PublishedRow;
use super::runner::{Summary, SUMMARY_FILE};
use crate::error::Result;

pub const GROUND_ENERGY_TOL: f64 = 1e-3;
pub const ENERGY_BEST_TOL: f64 = 1.6e-3;
pub const ENERGY_STD_MAX: f64 = 1e-3;
pub const FIDELITY_MEAN_MIN: f64 = 0.9995;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowChecks {
    pub ground_energy: bool,
    pub energy_best: bool,
    pub energy_std: bool,
    pub fidelity_mean: bool,
    pub invariants: bool,
}

impl RowChecks {
    pub fn all(&self) -> bool {
        self.ground_energy && self.energy_best && self.energy_std && self.fidelity_mean && self.invariants
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub preset: String,
    pub summary: Summary,
    pub published: Option<PublishedRow>,
    pub checks: RowChecks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table2Report {
    pub rows: Vec<Table2Row>,
    pub missing: Vec<String>,
}

/// Compares a run with its published row: exact ground energy within
/// [`GROUND_ENERGY_TOL`], best energy within [`ENERGY_BEST_TOL`] of the
/// published ground energy, energy STD at most [`ENERGY_STD_MAX`] and mean
/// fidelity at least [`FIDELITY_MEAN_MIN`].
pub fn check_row(summary: &Summary) -> RowChecks {
    let target = summary
        .published
        .as_ref()
        .map(|p| p.ground_energy)
        .unwrap_or(summary.exact.ground_energy);
    RowChecks {
        ground_energy: (summary.exact.ground_energy - target).abs() <= GROUND_ENERGY_TOL,
        energy_best: (summary.energy.best - target).abs() <= ENERGY_BEST_TOL,
        energy_std: summary.energy.std <= ENERGY_STD_MAX,
        fidelity_mean: summary.fidelity.mean >= FIDELITY_MEAN_MIN,
        invariants: summary.all_checks_passed,
    }
}

/// Reads `<dir>/<preset>/summary.json` for each preset.
pub fn table2_report(dir: impl AsRef<Path>, presets: &[&str]) -> Result<Table2Report> {
    let dir = dir.as_ref();
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for &p in presets {
        let path = dir.join(p).join(SUMMARY_FILE);
        if !path.is_file() {
            missing.push(p.to_string());
            continue;
        }
        let summary = Summary::read(&path)?;
        rows.push(Table2Row {
            preset: p.to_string(),
            published: summary.published.clone(),
            checks: check_row(&summary),
            summary,
        });
    }
    Ok(Table2Report { rows, missing })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl Table2Report {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.rows.iter().all(|r| r.checks.all())
    }

    /// Plain-text table; each measured row is followed by the published one.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:<6} {:>10} {:>11} {:>11} {:>9} {:>8} {:>8} {:>8}  result",
            "model", "blocks", "E0", "E-best", "E-mean", "E-STD", "F-best", "F-mean", "F-STD"
        );
        for r in &self.rows {
            let s = &r.summary;
            let label = r.published.as_ref().map(|p| p.label.clone()).unwrap_or(s.model_label.clone());
            let c = &r.checks;
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:>10.4} {:>11.4} {:>11.4} {:>9.4} {:>8.4} {:>8.4} {:>8.4}  {} (E0 {}, best {}, std {}, fidelity {}, invariants {})",
                label,
                s.ansatz.blocks,
                s.exact.ground_energy,
                s.energy.best,
                s.energy.mean,
                s.energy.std,
                s.fidelity.best,
                s.fidelity.mean,
                s.fidelity.std,
                mark(c.all()),
                mark(c.ground_energy),
                mark(c.energy_best),
                mark(c.energy_std),
                mark(c.fidelity_mean),
                mark(c.invariants),
            );
            if let Some(p) = &r.published {
                let _ = writeln!(
                    out,
                    "{:<12} {:<6} {:>10.4} {:>11} {:>11} {:>9} {:>8} {:>8} {:>8}",
                    "  published",
                    "",
                    p.ground_energy,
                    opt(p.energy_best),
                    opt(p.energy_mean),
                    opt(p.energy_std),
                    opt(p.fidelity_best),
                    opt(p.fidelity_mean),
                    opt(p.fidelity_std),
                );
            }
        }
        if !self.missing.is_empty() {
            let _ = writeln!(out, "missing: {}", self.missing.join(", "));
        }
        out
    }
}
