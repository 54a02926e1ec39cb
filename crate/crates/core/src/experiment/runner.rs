use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, PenaltyConfig, PenaltyOperator, PublishedRow};
use crate::analysis::{
    aggregate, avg_entropy_base, ground_state, sector_ground, SolverKind, SpectrumResult, TerminalStats,
    DEFAULT_DEGENERACY_TOL,
};
use crate::ansatz::{self, init_params, AnsatzFamily, HsaMode, InitScheme};
use crate::error::{Error, Result};
use crate::hamiltonians::{build_symmetry_ops, Boundary, ModelSpec, HM_CALIBRATED_BOUNDARY};
use crate::optimize::{derive_seed, train, AdamConfig, GradientMethod, Objective, Segment, TrainSpec, TrainingTrace};
use crate::pauli::PauliSum;
use crate::statevec::prepare_reference;

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.toml";

pub fn trace_file_name(index: usize) -> String {
    format!("trace_{index:03}.csv")
}

/// Overrides applied on top of a config at run time.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Directory receiving traces and the summary; replaces `output_dir/name`.
    pub out_dir: Option<PathBuf>,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    pub master_seed: Option<u64>,
    pub shots: Option<u64>,
    /// Prints one line per finished realization to stderr.
    pub progress: bool,
}

impl RunOptions {
    pub fn apply(&self, config: &ExperimentConfig) -> Result<ExperimentConfig> {
        let mut c = config.clone();
        if let Some(s) = self.master_seed {
            c.master_seed = s;
        }
        if let Some(s) = self.shots {
            c.shots = Some(s);
            if c.gradient == GradientMethod::Adjoint {
                c.gradient = GradientMethod::Auto;
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn output_dir(&self, config: &ExperimentConfig) -> PathBuf {
        match &self.out_dir {
            Some(d) => d.clone(),
            None => config
                .output_dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("runs"))
                .join(&config.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSummary {
    pub family: AnsatzFamily,
    pub blocks: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matched_eha_blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hsa_mode: Option<HsaMode>,
    pub num_parameters: usize,
    pub num_gates: usize,
    pub cx_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    pub ground_energy: f64,
    pub degeneracy: usize,
    pub degeneracy_tolerance: f64,
    pub solver: SolverKind,
    /// Set when the reference is restricted to a penalty sector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<PenaltyConfig>,
    /// Average single-qubit entropy of the ground state; absent when the
    /// ground space is degenerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_entropy: Option<f64>,
}

/// Pointwise statistics of the last trace record over realizations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Envelope {
    fn of(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Envelope {
            mean: mean.clamp(min, max),
            min,
            max,
        }
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationSummary {
    pub index: usize,
    pub seed: u64,
    pub init_seed: u64,
    pub best_iteration: usize,
    pub best_cost: f64,
    pub best_energy: f64,
    pub best_fidelity: f64,
    pub final_energy: f64,
    pub final_entropy: f64,
    pub final_params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

/// Choices the numbers depend on, stored with every run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decisions {
    /// Boundary of the Heisenberg chain used by this run, or the calibrated
    /// default for other models.
    pub hm_boundary: Boundary,
    pub hm_boundary_calibrated: Boundary,
    pub entropy_base: f64,
    pub adam: AdamConfig,
    pub gradient_method: GradientMethod,
    pub expectation: String,
    pub qubit_order: String,
    pub rotation_convention: String,
    pub std_convention: String,
    pub solution_iterate: String,
    pub seed_derivation: String,
    pub init_scheme: InitScheme,
    pub reference_state: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub model: ModelSpec,
    pub model_label: String,
    pub num_qubits: usize,
    pub num_terms: usize,
    pub ansatz: AnsatzSummary,
    pub schedule: Vec<Segment>,
    pub total_iterations: usize,
    pub realizations: usize,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyConfig>,
    pub exact: ExactSummary,
    /// Energy at each realization's minimum-cost iterate.
    pub energy: TerminalStats,
    /// Ground-space fidelity of the same iterates.
    pub fidelity: TerminalStats,
    pub final_energy: Envelope,
    pub final_entropy: Envelope,
    pub per_realization: Vec<RealizationSummary>,
    pub decisions: Decisions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published: Option<PublishedRow>,
    pub checks: Vec<Check>,
    pub all_checks_passed: bool,
    pub version: String,
}

impl Summary {
    pub fn read(path: impl AsRef<Path>) -> Result<Summary> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub summary: Summary,
    pub traces: Vec<TrainingTrace>,
    pub out_dir: Option<PathBuf>,
}

/// Hamiltonian, penalty operator and exact reference of a config.
pub struct Problem {
    pub hamiltonian: PauliSum,
    pub penalty_operator: Option<PauliSum>,
    pub spectrum: SpectrumResult,
}

pub fn penalty_operator(op: PenaltyOperator, num_qubits: usize) -> Result<PauliSum> {
    let ops = build_symmetry_ops(num_qubits)?;
    Ok(match op {
        PenaltyOperator::NumberOp => ops.number_op,
        PenaltyOperator::SZ => ops.s_z,
    })
}

/// Builds the Hamiltonian and solves for its ground space, restricted to the
/// penalty sector when a penalty is configured.
pub fn prepare_problem(config: &ExperimentConfig) -> Result<Problem> {
    let hamiltonian = config.model.build()?;
    let n = hamiltonian.num_qubits();
    let (penalty_operator, spectrum) = match &config.penalty {
        Some(p) => {
            let op = penalty_operator(p.operator, n)?;
            let s = sector_ground(&hamiltonian, &op, p.target, DEFAULT_DEGENERACY_TOL)?;
            (Some(op), s)
        }
        None => (None, ground_state(&hamiltonian, DEFAULT_DEGENERACY_TOL)?),
    };
    Ok(Problem {
        hamiltonian,
        penalty_operator,
        spectrum,
    })
}

fn realization(
    config: &ExperimentConfig,
    template: &ansatz::CircuitTemplate,
    objective: &Objective,
    index: usize,
) -> Result<(TrainingTrace, u64)> {
    let seed = derive_seed(config.master_seed, index as u64);
    let init_seed = derive_seed(seed, 0);
    let initial_params = init_params(template, &config.init_scheme(), init_seed)?;
    let reference = prepare_reference(&config.reference(), template.num_qubits())?;
    let spec = TrainSpec {
        template: template.clone(),
        objective: objective.clone(),
        reference,
        initial_params,
        schedule: config.schedule.clone(),
        adam: config.optimizer,
        gradient: config.gradient,
        seed: derive_seed(seed, 1),
        entropy_base: config.entropy_base,
    };
    let mut trace = train(&spec)?;
    trace.seed = seed;
    Ok((trace, init_seed))
}

/// Runs every realization without touching the filesystem.
pub fn execute(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentResult> {
    run(config, opts, None)
}

/// Runs every realization and writes `config.toml`, one trace CSV per
/// realization and `summary.json` into the output directory.
pub fn run_experiment(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentResult> {
    let dir = opts.output_dir(config);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let res = run(config, opts, Some(&dir))?;
    let path = dir.join(SUMMARY_FILE);
    let json = serde_json::to_string_pretty(&res.summary)?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(res)
}

fn run(config: &ExperimentConfig, opts: &RunOptions, dir: Option<&Path>) -> Result<ExperimentResult> {
    let config = opts.apply(config)?;
    let problem = prepare_problem(&config)?;
    let n = problem.hamiltonian.num_qubits();
    let blocks = config.ansatz.resolve_blocks(n)?;
    let template = ansatz::build(config.ansatz.family, n, blocks, config.ansatz.hsa_mode)?;

    let mut objective = Objective::energy(problem.hamiltonian.clone()).with_shots(config.shots)?;
    if let (Some(p), Some(op)) = (&config.penalty, &problem.penalty_operator) {
        objective = objective.with_penalty(op.clone(), p.target, p.beta)?;
    }

    if let Some(d) = dir {
        let path = d.join(CONFIG_FILE);
        std::fs::write(&path, config.to_toml_string()?).map_err(|e| Error::io(&path, e))?;
    }

    let job = |index: usize| -> Result<(TrainingTrace, u64)> {
        let (trace, init_seed) = realization(&config, &template, &objective, index)?;
        if let Some(d) = dir {
            trace.write_csv_file(d.join(trace_file_name(index)))?;
        }
        if opts.progress {
            eprintln!(
                "{}: realization {}/{} best energy {:.6} at iteration {}",
                config.name,
                index + 1,
                config.realizations,
                trace.best_energy,
                trace.best_iteration
            );
        }
        Ok((trace, init_seed))
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let results: Vec<(TrainingTrace, u64)> = pool.install(|| {
        (0..config.realizations)
            .into_par_iter()
            .map(job)
            .collect::<Result<Vec<_>>>()
    })?;
    let (traces, init_seeds): (Vec<_>, Vec<_>) = results.into_iter().unzip();

    let summary = summarize(&config, &problem, &template, blocks, &traces, &init_seeds)?;
    Ok(ExperimentResult {
        summary,
        traces,
        out_dir: dir.map(Path::to_path_buf),
    })
}

fn summarize(
    config: &ExperimentConfig,
    problem: &Problem,
    template: &ansatz::CircuitTemplate,
    blocks: usize,
    traces: &[TrainingTrace],
    init_seeds: &[u64],
) -> Result<Summary> {
    let n = problem.hamiltonian.num_qubits();
    let spectrum = &problem.spectrum;
    let total = config.schedule.total_iterations();
    let aborted = traces.iter().any(|t| t.aborted.is_some());

    let (energy, fidelity, fids) = if aborted {
        let nan = TerminalStats {
            best: f64::NAN,
            mean: f64::NAN,
            std: f64::NAN,
        };
        (nan, nan, vec![f64::NAN; traces.len()])
    } else {
        let agg = aggregate(traces, spectrum)?;
        (agg.terminal_energy, agg.terminal_fidelity, agg.terminal_fidelities)
    };
    let last = |f: fn(&crate::optimize::TraceRecord) -> f64| -> Vec<f64> {
        traces
            .iter()
            .map(|t| t.final_record().map(f).unwrap_or(f64::NAN))
            .collect()
    };
    let final_energies = last(|r| r.energy);
    let final_entropies = last(|r| r.entropy);

    let ground_entropy = if spectrum.degeneracy() == 1 {
        Some(avg_entropy_base(&spectrum.ground_space[0], config.entropy_base)?)
    } else {
        None
    };

    let per_realization = traces
        .iter()
        .enumerate()
        .map(|(i, t)| RealizationSummary {
            index: i,
            seed: t.seed,
            init_seed: init_seeds[i],
            best_iteration: t.best_iteration,
            best_cost: t.best_cost,
            best_energy: t.best_energy,
            best_fidelity: fids[i],
            final_energy: final_energies[i],
            final_entropy: final_entropies[i],
            final_params: t.final_params.clone(),
            aborted: t.aborted.clone(),
        })
        .collect();

    let checks = invariant_checks(config, problem, traces, &fids);
    let all_checks_passed = checks.iter().all(|c| c.passed);
    let info = template.describe();
    let hm_boundary = match &config.model {
        ModelSpec::Hm { boundary, .. } => *boundary,
        _ => HM_CALIBRATED_BOUNDARY,
    };
    let gradient_method = traces
        .first()
        .map(|t| t.gradient_method)
        .unwrap_or(config.gradient);

    Ok(Summary {
        name: config.name.clone(),
        note: config.note.clone(),
        model: config.model.clone(),
        model_label: config.model.label(),
        num_qubits: n,
        num_terms: problem.hamiltonian.len(),
        ansatz: AnsatzSummary {
            family: config.ansatz.family,
            blocks,
            matched_eha_blocks: config.ansatz.matched_eha_blocks,
            hsa_mode: info.hsa_mode,
            num_parameters: info.num_parameters,
            num_gates: info.num_gates,
            cx_count: info.cx_count,
        },
        schedule: config.schedule.segments().to_vec(),
        total_iterations: total,
        realizations: traces.len(),
        master_seed: config.master_seed,
        shots: config.shots,
        penalty: config.penalty,
        exact: ExactSummary {
            ground_energy: spectrum.ground_energy,
            degeneracy: spectrum.degeneracy(),
            degeneracy_tolerance: spectrum.degeneracy_tolerance,
            solver: spectrum.solver,
            sector: config.penalty,
            ground_entropy,
        },
        energy,
        fidelity,
        final_energy: Envelope::of(&final_energies),
        final_entropy: Envelope::of(&final_entropies),
        per_realization,
        decisions: Decisions {
            hm_boundary,
            hm_boundary_calibrated: HM_CALIBRATED_BOUNDARY,
            entropy_base: config.entropy_base,
            adam: config.optimizer,
            gradient_method,
            expectation: match config.shots {
                Some(s) => format!("sampled, {s} shots per Pauli term (binomial)"),
                None => "exact".into(),
            },
            qubit_order: "qubit 0 is the most significant bit".into(),
            rotation_convention: "exp(-i theta/2 P)".into(),
            std_convention: "population".into(),
            solution_iterate: "minimum-cost iterate of each realization".into(),
            seed_derivation: "realization seed = splitmix64(master_seed, index); init seed = splitmix64(seed, 0); sampling seed = splitmix64(seed, 1)".into(),
            init_scheme: config.init_scheme(),
            reference_state: config.reference().to_string(),
        },
        published: config.published.clone(),
        checks,
        all_checks_passed,
        version: env!("CARGO_PKG_VERSION").into(),
    })
}

fn invariant_checks(config: &ExperimentConfig, problem: &Problem, traces: &[TrainingTrace], fids: &[f64]) -> Vec<Check> {
    let total = config.schedule.total_iterations();
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            passed,
            detail,
        })
    };

    let bad_len: Vec<usize> = traces
        .iter()
        .enumerate()
        .filter(|(_, t)| t.records.len() != total + 1)
        .map(|(i, _)| i)
        .collect();
    push(
        "record_count",
        bad_len.is_empty(),
        format!("expected {} records per trace; mismatched realizations {:?}", total + 1, bad_len),
    );

    let aborted: Vec<String> = traces.iter().filter_map(|t| t.aborted.clone()).collect();
    push("finite_cost", aborted.is_empty(), aborted.join("; "));

    // the sector ground energy only bounds states inside the sector
    if config.penalty.is_none() {
        let e0 = problem.spectrum.ground_energy;
        let slack = 1e-9 * e0.abs().max(1.0);
        let min = traces
            .iter()
            .flat_map(|t| t.records.iter().map(|r| r.energy))
            .fold(f64::INFINITY, f64::min);
        push(
            "variational_bound",
            min >= e0 - slack,
            format!("lowest recorded energy {min} vs exact {e0}"),
        );
    }

    let max_s = 2f64.ln() / config.entropy_base.ln();
    let (lo, hi) = traces
        .iter()
        .flat_map(|t| t.records.iter().map(|r| r.entropy))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)));
    push(
        "entropy_range",
        lo >= -1e-9 && hi <= max_s + 1e-9,
        format!("entropy within [{lo}, {hi}], allowed [0, {max_s}]"),
    );

    let fid_ok = fids.iter().all(|f| (-1e-9..=1.0 + 1e-9).contains(f));
    push("fidelity_range", fid_ok, format!("{fids:?}"));
    checks
}
