//! Experiment configs, runners and reports.

mod config;
mod presets;
mod report;
mod runner;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{AnsatzConfig, ExperimentConfig, PenaltyConfig, PenaltyOperator, PublishedRow};
pub use presets::{
    merge_tables, parse_suite, preset, preset_names, preset_source, suite, suite_names, table2_presets, Suite,
    TABLE2_DESK, TABLE2_FULL,
};
pub use report::{
    check_row, table2_report, RowChecks, Table2Report, Table2Row, ENERGY_BEST_TOL, ENERGY_STD_MAX,
    FIDELITY_MEAN_MIN, GROUND_ENERGY_TOL,
};
pub use runner::{
    execute, penalty_operator, prepare_problem, run_experiment, trace_file_name, AnsatzSummary, Check, Decisions,
    Envelope, ExactSummary, ExperimentResult, Problem, RealizationSummary, RunOptions, Summary, CONFIG_FILE,
    SUMMARY_FILE,
};

use crate::ansatz::AnsatzFamily;
use crate::analysis::TerminalStats;
use crate::error::{Error, Result};

pub const SUITE_INDEX_FILE: &str = "suite.json";

/// One line of a suite index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantRow {
    pub name: String,
    pub family: AnsatzFamily,
    pub blocks: usize,
    pub cx_count: usize,
    pub reference_state: String,
    pub init_scheme: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    pub ground_energy: f64,
    pub energy: TerminalStats,
    pub fidelity: TerminalStats,
    pub final_energy: Envelope,
    pub final_entropy: Envelope,
    pub all_checks_passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteIndex {
    pub name: String,
    pub description: String,
    pub variants: Vec<VariantRow>,
    pub all_checks_passed: bool,
}

impl SuiteIndex {
    pub fn variant(&self, name: &str) -> Option<&VariantRow> {
        self.variants.iter().find(|v| v.name == name)
    }
}

fn variant_row(s: &Summary) -> VariantRow {
    VariantRow {
        name: s.name.clone(),
        family: s.ansatz.family,
        blocks: s.ansatz.blocks,
        cx_count: s.ansatz.cx_count,
        reference_state: s.decisions.reference_state.clone(),
        init_scheme: s.decisions.init_scheme.name().into(),
        shots: s.shots,
        ground_energy: s.exact.ground_energy,
        energy: s.energy,
        fidelity: s.fidelity,
        final_energy: s.final_energy,
        final_entropy: s.final_entropy,
        all_checks_passed: s.all_checks_passed,
    }
}

pub struct SuiteResult {
    pub index: SuiteIndex,
    pub runs: Vec<ExperimentResult>,
    pub out_dir: PathBuf,
}

/// Runs every variant into `<out>/<suite>/<variant>/` and writes
/// `<out>/<suite>/suite.json`. `opts.out_dir` is the parent directory here
/// (default `runs`).
pub fn run_suite(suite: &Suite, opts: &RunOptions) -> Result<SuiteResult> {
    let root = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("runs")).join(&suite.name);
    let mut runs = Vec::with_capacity(suite.variants.len());
    for cfg in &suite.variants {
        let o = RunOptions {
            out_dir: Some(root.join(&cfg.name)),
            ..opts.clone()
        };
        runs.push(run_experiment(cfg, &o)?);
    }
    let variants: Vec<VariantRow> = runs.iter().map(|r| variant_row(&r.summary)).collect();
    let index = SuiteIndex {
        name: suite.name.clone(),
        description: suite.description.clone(),
        all_checks_passed: variants.iter().all(|v| v.all_checks_passed),
        variants,
    };
    write_json(&root.join(SUITE_INDEX_FILE), &index)?;
    Ok(SuiteResult {
        index,
        runs,
        out_dir: root,
    })
}

pub fn read_suite_index(path: impl AsRef<Path>) -> Result<SuiteIndex> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}
