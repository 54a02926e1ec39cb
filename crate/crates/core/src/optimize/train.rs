use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{adam_step, derive_seed, l2_norm, AdamConfig, Objective, OptimizerState, Program, StepSchedule};
use crate::analysis::avg_entropy_base;
use crate::ansatz::CircuitTemplate;
use crate::error::{Error, Result};
use crate::statevec::Statevector;

pub const TRACE_HEADER: [&str; 4] = ["iter", "energy", "entropy", "grad_norm"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Adjoint for exact objectives, parameter shift for sampled ones.
    #[default]
    Auto,
    Adjoint,
    ParameterShift,
}

#[derive(Clone, Debug)]
pub struct TrainSpec {
    pub template: CircuitTemplate,
    pub objective: Objective,
    pub reference: Statevector,
    pub initial_params: Vec<f64>,
    pub schedule: StepSchedule,
    pub adam: AdamConfig,
    pub gradient: GradientMethod,
    /// Drives shot sampling; unused in exact mode.
    pub seed: u64,
    pub entropy_base: f64,
}

/// One row of the trace. `energy` is always the exact `<H>`; `cost` is what
/// the optimizer sees (penalized and/or shot-estimated).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub energy: f64,
    pub cost: f64,
    pub entropy: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainingTrace {
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    pub best_iteration: usize,
    pub best_cost: f64,
    pub best_energy: f64,
    pub best_params: Vec<f64>,
    pub adam: AdamConfig,
    pub gradient_method: GradientMethod,
    /// Set when a non-finite cost stopped training early.
    pub aborted: Option<String>,
    #[serde(skip)]
    pub best_state: Option<Statevector>,
    #[serde(skip)]
    pub final_state: Option<Statevector>,
}

impl TrainingTrace {
    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// CSV with header `iter,energy,entropy,grad_norm`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.energy.to_string(),
                r.entropy.to_string(),
                r.grad_norm.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<trace>".into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Parses a trace CSV back into `(iter, energy, entropy, grad_norm)` rows
/// (`cost` is set equal to `energy`).
pub fn read_trace_csv<R: Read>(reader: R) -> Result<Vec<TraceRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != TRACE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("trace header must be `{}`", TRACE_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let field = |k: usize| -> Result<&str> {
            row.get(k).ok_or_else(|| Error::Parse {
                line,
                message: "missing column".into(),
            })
        };
        let num = |k: usize| -> Result<f64> {
            field(k)?.trim().parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("bad number in column `{}`", TRACE_HEADER[k]),
            })
        };
        let iter = field(0)?.trim().parse::<usize>().map_err(|_| Error::Parse {
            line,
            message: "bad iteration index".into(),
        })?;
        let energy = num(1)?;
        out.push(TraceRecord {
            iter,
            energy,
            cost: energy,
            entropy: num(2)?,
            grad_norm: num(3)?,
        });
    }
    Ok(out)
}

struct Point {
    cost: f64,
    energy: f64,
    gradient: Vec<f64>,
    state: Statevector,
}

fn evaluate(
    program: &Program,
    spec: &TrainSpec,
    method: GradientMethod,
    params: &[f64],
    iteration: usize,
) -> Result<Point> {
    match method {
        GradientMethod::Adjoint | GradientMethod::Auto => {
            let e = program.evaluate_adjoint(params, &spec.objective, &spec.reference)?;
            Ok(Point {
                cost: e.value.cost,
                energy: e.value.energy,
                gradient: e.gradient,
                state: e.state,
            })
        }
        GradientMethod::ParameterShift => {
            let it_seed = derive_seed(spec.seed, iteration as u64);
            let state = program.prepare(params, &spec.reference)?;
            let cost = spec.objective.evaluate(&state, derive_seed(it_seed, u64::MAX))?.cost;
            let energy = spec.objective.hamiltonian.expectation(&state)?;
            let gradient = program.gradient_parameter_shift(params, &spec.objective, &spec.reference, it_seed)?;
            Ok(Point {
                cost,
                energy,
                gradient,
                state,
            })
        }
    }
}

/// Runs the schedule with Adam. Iteration 0 is the initial point; one record
/// follows every step, so a schedule of `T` iterations yields `T + 1` records.
/// The minimum-cost iterate is kept as the approximate solution.
pub fn train(spec: &TrainSpec) -> Result<TrainingTrace> {
    spec.adam.validate()?;
    if spec.template.num_qubits() != spec.objective.num_qubits() {
        return Err(Error::DimensionMismatch {
            left: spec.template.num_qubits(),
            right: spec.objective.num_qubits(),
        });
    }
    let method = match spec.gradient {
        GradientMethod::Auto if spec.objective.is_sampled() => GradientMethod::ParameterShift,
        GradientMethod::Auto => GradientMethod::Adjoint,
        m => m,
    };
    let program = Program::compile(&spec.template);
    let mut params = spec.initial_params.clone();
    let mut opt = OptimizerState::new(params.len(), spec.adam);
    let total = spec.schedule.total_iterations();
    let mut steps = spec.schedule.step_sizes();

    let mut trace = TrainingTrace {
        seed: spec.seed,
        records: Vec::with_capacity(total + 1),
        initial_params: params.clone(),
        final_params: Vec::new(),
        best_iteration: 0,
        best_cost: f64::INFINITY,
        best_energy: f64::INFINITY,
        best_params: params.clone(),
        adam: spec.adam,
        gradient_method: method,
        aborted: None,
        best_state: None,
        final_state: None,
    };

    for iter in 0..=total {
        let p = evaluate(&program, spec, method, &params, iter)?;
        if !p.cost.is_finite() {
            trace.aborted = Some(format!("non-finite cost {} at iteration {iter}", p.cost));
            break;
        }
        let grad_norm = l2_norm(&p.gradient);
        let entropy = avg_entropy_base(&p.state, spec.entropy_base)?;
        trace.records.push(TraceRecord {
            iter,
            energy: p.energy,
            cost: p.cost,
            entropy,
            grad_norm,
        });
        if p.cost < trace.best_cost {
            trace.best_iteration = iter;
            trace.best_cost = p.cost;
            trace.best_energy = p.energy;
            trace.best_params.clone_from(&params);
            trace.best_state = Some(p.state.clone());
        }
        if iter == total {
            trace.final_state = Some(p.state);
            break;
        }
        let step = steps.next().expect("one step size per iteration");
        adam_step(&mut opt, &mut params, &p.gradient, step)?;
    }
    trace.final_params = params;
    Ok(trace)
}
