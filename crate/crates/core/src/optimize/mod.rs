//! Cost functionals, analytic gradients, Adam and the training loop.

mod adam;
mod train;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use adam::{adam_step, AdamConfig, OptimizerState, Segment, StepSchedule};
pub use train::{read_trace_csv, train, GradientMethod, TraceRecord, TrainSpec, TrainingTrace, TRACE_HEADER};

use crate::ansatz::{CircuitTemplate, ParamRef};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevec::kernel::{self, PauliMask};
use crate::statevec::{Primitive, Statevector};

/// Mixes a master seed with a stream index (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `beta (<operator> - target)^2` added to the energy.
#[derive(Clone, Debug, PartialEq)]
pub struct Penalty {
    pub operator: PauliSum,
    pub target: f64,
    pub beta: f64,
}

/// What training minimizes: `<H>`, optionally penalized, optionally estimated
/// from `shots` measurements per Pauli term.
#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub hamiltonian: PauliSum,
    pub penalty: Option<Penalty>,
    pub shots: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostValue {
    pub cost: f64,
    pub energy: f64,
}

impl Objective {
    pub fn energy(hamiltonian: PauliSum) -> Self {
        Objective {
            hamiltonian,
            penalty: None,
            shots: None,
        }
    }

    pub fn with_penalty(mut self, operator: PauliSum, target: f64, beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("penalty weight must be >= 0, got {beta}")));
        }
        if operator.num_qubits() != self.hamiltonian.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: self.hamiltonian.num_qubits(),
                right: operator.num_qubits(),
            });
        }
        self.penalty = Some(Penalty {
            operator,
            target,
            beta,
        });
        Ok(self)
    }

    pub fn with_shots(mut self, shots: Option<u64>) -> Result<Self> {
        if shots == Some(0) {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        self.shots = shots;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }

    pub fn is_sampled(&self) -> bool {
        self.shots.is_some()
    }

    pub fn evaluate_exact(&self, state: &Statevector) -> Result<CostValue> {
        let energy = self.hamiltonian.expectation(state)?;
        let cost = match &self.penalty {
            Some(p) => energy + p.beta * (p.operator.expectation(state)? - p.target).powi(2),
            None => energy,
        };
        Ok(CostValue { cost, energy })
    }

    /// Shot-based when `shots` is set, exact otherwise. `seed` is ignored in
    /// exact mode.
    pub fn evaluate(&self, state: &Statevector, seed: u64) -> Result<CostValue> {
        let (energy, constraint) = self.components(state, seed)?;
        let cost = match (&self.penalty, constraint) {
            (Some(p), Some(c)) => energy + p.beta * (c - p.target).powi(2),
            _ => energy,
        };
        Ok(CostValue { cost, energy })
    }

    /// `(<H>, <C>)` estimates, the second only with a penalty.
    pub fn components(&self, state: &Statevector, seed: u64) -> Result<(f64, Option<f64>)> {
        let expect = |op: &PauliSum, stream: u64| match self.shots {
            Some(shots) => op.expectation_sampled(state, shots, derive_seed(seed, stream)),
            None => op.expectation(state),
        };
        let energy = expect(&self.hamiltonian, 0)?;
        let constraint = match &self.penalty {
            Some(p) => Some(expect(&p.operator, 1)?),
            None => None,
        };
        Ok((energy, constraint))
    }
}

#[derive(Clone, Copy, Debug)]
enum Step {
    /// `exp(-i angle/2 P)` with `angle = coeff * params[slot] + offset`.
    Rotation {
        pauli: PauliMask,
        slot: Option<usize>,
        coeff: f64,
        offset: f64,
    },
    Fixed(Primitive),
}

/// A template flattened into rotation and fixed primitives with resolved
/// parameter bindings.
#[derive(Clone, Debug)]
pub struct Program {
    num_qubits: usize,
    num_parameters: usize,
    steps: Vec<Step>,
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub gradient: Vec<f64>,
    pub value: CostValue,
    pub state: Statevector,
}

impl Program {
    pub fn compile(template: &CircuitTemplate) -> Self {
        let n = template.num_qubits();
        let mut steps = Vec::new();
        for g in template.gates() {
            for prim in g.kind.primitives(n, &g.targets) {
                match prim {
                    Primitive::Rotation { pauli, param, factor } => match g.params[param] {
                        ParamRef::Slot { index, scale } => steps.push(Step::Rotation {
                            pauli,
                            slot: Some(index),
                            coeff: factor * scale,
                            offset: 0.0,
                        }),
                        ParamRef::Fixed(v) if v != 0.0 => steps.push(Step::Rotation {
                            pauli,
                            slot: None,
                            coeff: 0.0,
                            offset: factor * v,
                        }),
                        ParamRef::Fixed(_) => {}
                    },
                    other => steps.push(Step::Fixed(other)),
                }
            }
        }
        Program {
            num_qubits: n,
            num_parameters: template.num_parameters(),
            steps,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_parameters(&self) -> usize {
        self.num_parameters
    }

    /// Number of parameterized rotation primitives.
    pub fn num_rotations(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Rotation { slot: Some(_), .. }))
            .count()
    }

    fn check(&self, params: &[f64], reference: &Statevector) -> Result<()> {
        if params.len() != self.num_parameters {
            return Err(Error::LengthMismatch {
                expected: self.num_parameters,
                got: params.len(),
            });
        }
        if reference.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: reference.num_qubits(),
            });
        }
        Ok(())
    }

    #[inline]
    fn angle(step: &Step, params: &[f64]) -> f64 {
        match *step {
            Step::Rotation {
                slot, coeff, offset, ..
            } => slot.map_or(offset, |s| coeff * params[s] + offset),
            Step::Fixed(_) => 0.0,
        }
    }

    fn run_steps(&self, steps: &[Step], params: &[f64], amps: &mut [Complex64]) {
        for step in steps {
            match step {
                Step::Rotation { pauli, .. } => kernel::pauli_rotation(amps, *pauli, Self::angle(step, params)),
                Step::Fixed(p) => p.apply_fixed(amps),
            }
        }
    }

    /// `U(params)|reference>`
    pub fn prepare(&self, params: &[f64], reference: &Statevector) -> Result<Statevector> {
        self.check(params, reference)?;
        let mut out = reference.clone();
        self.run_steps(&self.steps, params, out.amplitudes_mut());
        Ok(out)
    }

    /// Gradient by the shift rule on every parameterized primitive: each
    /// occurrence of a slot contributes `coeff * (E(+pi/2) - E(-pi/2)) / 2`
    /// for every expectation `E`. A penalty enters through the chain rule,
    /// `2 beta (<C> - target) d<C>`, with `<C>` taken at the unshifted point.
    /// Sampled objectives draw a fresh seed for every evaluation.
    pub fn gradient_parameter_shift(
        &self,
        params: &[f64],
        objective: &Objective,
        reference: &Statevector,
        seed: u64,
    ) -> Result<Vec<f64>> {
        self.check(params, reference)?;
        let weight = match &objective.penalty {
            Some(p) => {
                let state = self.prepare(params, reference)?;
                let (_, c) = objective.components(&state, derive_seed(seed, u64::MAX))?;
                2.0 * p.beta * (c.unwrap_or(p.target) - p.target)
            }
            None => 0.0,
        };
        let mut grad = vec![0.0; self.num_parameters];
        let mut prefix = reference.clone();
        for (k, step) in self.steps.iter().enumerate() {
            if let Step::Rotation {
                pauli,
                slot: Some(slot),
                coeff,
                ..
            } = *step
            {
                let angle = Self::angle(step, params);
                let mut diff = 0.0;
                for (sign, stream) in [(1.0, 0u64), (-1.0, 1u64)] {
                    let mut s = prefix.clone();
                    kernel::pauli_rotation(s.amplitudes_mut(), pauli, angle + sign * FRAC_PI_2);
                    self.run_steps(&self.steps[k + 1..], params, s.amplitudes_mut());
                    let (e, c) = objective.components(&s, derive_seed(seed, 2 * k as u64 + stream))?;
                    diff += sign * (e + weight * c.unwrap_or(0.0));
                }
                grad[slot] += coeff * 0.5 * diff;
            }
            self.run_steps(std::slice::from_ref(step), params, prefix.amplitudes_mut());
        }
        Ok(grad)
    }

    /// Reverse-mode gradient of an exact objective: one forward pass and one
    /// fused backward sweep over the primitives.
    pub fn evaluate_adjoint(
        &self,
        params: &[f64],
        objective: &Objective,
        reference: &Statevector,
    ) -> Result<Evaluation> {
        if objective.is_sampled() {
            return Err(Error::Unsupported(
                "adjoint gradients need exact expectations; use the parameter-shift rule with shots".into(),
            ));
        }
        if objective.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: objective.num_qubits(),
            });
        }
        let state = self.prepare(params, reference)?;
        let dim = state.dim();
        let zero = Complex64::new(0.0, 0.0);
        let mut lambda = vec![zero; dim];
        objective.hamiltonian.apply_accumulate(state.amplitudes(), &mut lambda);
        let energy: f64 = state
            .amplitudes()
            .iter()
            .zip(&lambda)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let mut cost = energy;
        if let Some(p) = &objective.penalty {
            let mut av = vec![zero; dim];
            p.operator.apply_accumulate(state.amplitudes(), &mut av);
            let c: f64 = state
                .amplitudes()
                .iter()
                .zip(&av)
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            let w = 2.0 * p.beta * (c - p.target);
            for (l, a) in lambda.iter_mut().zip(&av) {
                *l += a * w;
            }
            cost += p.beta * (c - p.target).powi(2);
        }

        let mut grad = vec![0.0; self.num_parameters];
        let mut phi = state.amplitudes().to_vec();
        for step in self.steps.iter().rev() {
            match *step {
                Step::Rotation { pauli, slot, coeff, .. } => {
                    let angle = Self::angle(step, params);
                    let g = kernel::rotation_adjoint_step(&mut phi, &mut lambda, pauli, angle);
                    if let Some(s) = slot {
                        grad[s] += coeff * g;
                    }
                }
                Step::Fixed(p) => {
                    p.apply_fixed(&mut phi);
                    p.apply_fixed(&mut lambda);
                }
            }
        }
        Ok(Evaluation {
            gradient: grad,
            value: CostValue { cost, energy },
            state,
        })
    }
}

/// Parameter-shift gradient of `objective` at `U(params)|reference>`.
pub fn gradient_parameter_shift(
    template: &CircuitTemplate,
    params: &[f64],
    objective: &Objective,
    reference: &Statevector,
    seed: u64,
) -> Result<Vec<f64>> {
    Program::compile(template).gradient_parameter_shift(params, objective, reference, seed)
}

/// Adjoint-mode gradient; errors on a sampled objective.
pub fn gradient_adjoint(
    template: &CircuitTemplate,
    params: &[f64],
    objective: &Objective,
    reference: &Statevector,
) -> Result<Vec<f64>> {
    Ok(Program::compile(template)
        .evaluate_adjoint(params, objective, reference)?
        .gradient)
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
