//! Dense statevector, gate kinds and reference-state preparation.
//!
//! Qubit 0 is the most significant bit of the basis index: the amplitude of
//! `|q0 q1 ... q_{n-1}>` sits at index `q0 * 2^{n-1} + ... + q_{n-1}`.

pub mod decompose;
pub mod kernel;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use kernel::{qubit_bit, PauliMask};

pub const MAX_QUBITS: usize = 24;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        Ok(Statevector { num_qubits, amps })
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(num_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        s.amps[0] = ZERO;
        s.amps[index] = ONE;
        Ok(s)
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubits(num_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("amplitudes have zero or non-finite norm".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Statevector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_same(&self, other: &Statevector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Applies `gate` to `targets` with `params`; see [`apply_gate`].
    pub fn apply(&mut self, gate: GateKind, targets: &[usize], params: &[f64]) -> Result<()> {
        apply_gate(self, gate, targets, params)
    }

    /// Basis string for `index`, qubit 0 first.
    pub fn basis_label(&self, index: usize) -> String {
        (0..self.num_qubits)
            .map(|q| {
                if index & qubit_bit(self.num_qubits, q) != 0 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect()
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}

/// Initial product states used by the ansatz families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceState {
    AllZero,
    AllPlus,
    /// `(|01> - |10>)/sqrt(2)` on pairs (0,1), (2,3), ...
    SingletPairs,
    /// Computational basis state, qubit 0 first, e.g. `"0110"`.
    BasisString(String),
}

impl fmt::Display for ReferenceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceState::AllZero => f.write_str("all_zero"),
            ReferenceState::AllPlus => f.write_str("all_plus"),
            ReferenceState::SingletPairs => f.write_str("singlet_pairs"),
            ReferenceState::BasisString(s) => write!(f, "basis:{s}"),
        }
    }
}

impl FromStr for ReferenceState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all_zero" | "zero" => Ok(ReferenceState::AllZero),
            "all_plus" | "plus" => Ok(ReferenceState::AllPlus),
            "singlet_pairs" | "singlet" => Ok(ReferenceState::SingletPairs),
            other => match other.strip_prefix("basis:") {
                Some(bits) => {
                    parse_basis_string(bits)?;
                    Ok(ReferenceState::BasisString(bits.to_string()))
                }
                None => Err(Error::InvalidArgument(format!("unknown reference state `{other}`"))),
            },
        }
    }
}

/// Parses a basis string like `"0110"` into an index (qubit 0 = MSB).
pub fn parse_basis_string(bits: &str) -> Result<usize> {
    let n = bits.chars().count();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "basis string length {n} outside 1..={MAX_QUBITS}"
        )));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::InvalidArgument(format!(
            "malformed basis string `{bits}`: unexpected `{other}`"
        ))),
    })
}

pub fn prepare_reference(kind: &ReferenceState, num_qubits: usize) -> Result<Statevector> {
    check_qubits(num_qubits)?;
    match kind {
        ReferenceState::AllZero => Statevector::zero(num_qubits),
        ReferenceState::AllPlus => {
            let dim = 1usize << num_qubits;
            let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
            Ok(Statevector {
                num_qubits,
                amps: vec![a; dim],
            })
        }
        ReferenceState::SingletPairs => {
            if num_qubits % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "singlet_pairs needs an even qubit count, got {num_qubits}"
                )));
            }
            // product of (|01> - |10>)/sqrt2 factors; each pair contributes
            // one of two bit patterns with a sign
            let pairs = num_qubits / 2;
            let amp = FRAC_1_SQRT_2.powi(pairs as i32);
            let mut s = Statevector {
                num_qubits,
                amps: vec![ZERO; 1 << num_qubits],
            };
            for choice in 0..(1usize << pairs) {
                let mut index = 0usize;
                let mut sign = 1.0;
                for p in 0..pairs {
                    let (a, b) = (2 * p, 2 * p + 1);
                    if choice & (1 << p) == 0 {
                        index |= qubit_bit(num_qubits, b);
                    } else {
                        index |= qubit_bit(num_qubits, a);
                        sign = -sign;
                    }
                }
                s.amps[index] = Complex64::new(sign * amp, 0.0);
            }
            Ok(s)
        }
        ReferenceState::BasisString(bits) => {
            let index = parse_basis_string(bits)?;
            if bits.len() != num_qubits {
                return Err(Error::InvalidArgument(format!(
                    "basis string `{bits}` has length {} but register has {num_qubits} qubits",
                    bits.len()
                )));
            }
            Statevector::basis(num_qubits, index)
        }
    }
}

/// Gate set shared by every ansatz family.
///
/// Parameterized Pauli rotations follow `exp(-i theta/2 P)`. `Rot(phi, theta,
/// omega) = Rz(omega) Ry(theta) Rz(phi)`. `NGate(theta, phi, beta) =
/// exp(i(theta XX + phi YY + beta ZZ))`, applied as the commuting product
/// `XX(-2 theta) YY(-2 phi) ZZ(-2 beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Rot,
    XX,
    YY,
    ZZ,
    CX,
    CZ,
    NGate,
    H,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

/// One elementary step of a gate. Parameterized steps are Pauli rotations
/// `exp(-i angle/2 P)` with `angle = factor * params[param]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Primitive {
    Rotation {
        pauli: PauliMask,
        param: usize,
        factor: f64,
    },
    Cx {
        control: usize,
        target: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    Hadamard {
        bit: usize,
    },
    Pauli {
        pauli: PauliMask,
    },
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "Rx",
            GateKind::Ry => "Ry",
            GateKind::Rz => "Rz",
            GateKind::Rot => "Rot",
            GateKind::XX => "XX",
            GateKind::YY => "YY",
            GateKind::ZZ => "ZZ",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::NGate => "NGate",
            GateKind::H => "H",
            GateKind::X => "X",
        }
    }

    pub fn num_targets(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Rot | GateKind::H | GateKind::X => 1,
            _ => 2,
        }
    }

    pub fn num_params(self) -> usize {
        match self {
            GateKind::Rot | GateKind::NGate => 3,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::XX | GateKind::YY | GateKind::ZZ => 1,
            GateKind::CX | GateKind::CZ | GateKind::H | GateKind::X => 0,
        }
    }

    /// CX-equivalent cost: XX/YY/ZZ realized with two CX, NGate with three.
    pub fn cx_cost(self) -> usize {
        match self {
            GateKind::XX | GateKind::YY | GateKind::ZZ => 2,
            GateKind::NGate => 3,
            GateKind::CX | GateKind::CZ => 1,
            _ => 0,
        }
    }

    /// Expands the gate on `targets` into primitives for a register of
    /// `num_qubits`. Targets must already be validated.
    pub fn primitives(self, num_qubits: usize, targets: &[usize]) -> Vec<Primitive> {
        use PauliLetter as L;
        let one = |letter: L| mask(num_qubits, &[(targets[0], letter)]);
        let two = |letter: L| mask(num_qubits, &[(targets[0], letter), (targets[1], letter)]);
        let rot = |pauli, param, factor| Primitive::Rotation {
            pauli,
            param,
            factor,
        };
        match self {
            GateKind::Rx => vec![rot(one(L::X), 0, 1.0)],
            GateKind::Ry => vec![rot(one(L::Y), 0, 1.0)],
            GateKind::Rz => vec![rot(one(L::Z), 0, 1.0)],
            GateKind::Rot => vec![
                rot(one(L::Z), 0, 1.0),
                rot(one(L::Y), 1, 1.0),
                rot(one(L::Z), 2, 1.0),
            ],
            GateKind::XX => vec![rot(two(L::X), 0, 1.0)],
            GateKind::YY => vec![rot(two(L::Y), 0, 1.0)],
            GateKind::ZZ => vec![rot(two(L::Z), 0, 1.0)],
            GateKind::NGate => vec![
                rot(two(L::X), 0, -2.0),
                rot(two(L::Y), 1, -2.0),
                rot(two(L::Z), 2, -2.0),
            ],
            GateKind::CX => vec![Primitive::Cx {
                control: qubit_bit(num_qubits, targets[0]),
                target: qubit_bit(num_qubits, targets[1]),
            }],
            GateKind::CZ => vec![Primitive::Cz {
                a: qubit_bit(num_qubits, targets[0]),
                b: qubit_bit(num_qubits, targets[1]),
            }],
            GateKind::H => vec![Primitive::Hadamard {
                bit: qubit_bit(num_qubits, targets[0]),
            }],
            GateKind::X => vec![Primitive::Pauli { pauli: one(L::X) }],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Builds a Pauli mask from `(qubit, letter)` pairs.
pub fn mask(num_qubits: usize, letters: &[(usize, PauliLetter)]) -> PauliMask {
    let mut m = PauliMask::IDENTITY;
    for &(q, letter) in letters {
        let bit = qubit_bit(num_qubits, q);
        match letter {
            PauliLetter::I => {}
            PauliLetter::X => m.x |= bit,
            PauliLetter::Z => m.z |= bit,
            PauliLetter::Y => {
                m.x |= bit;
                m.z |= bit;
            }
        }
    }
    m
}

impl Primitive {
    #[inline]
    pub(crate) fn apply(&self, amps: &mut [Complex64], params: &[f64]) {
        match *self {
            Primitive::Rotation {
                pauli,
                param,
                factor,
            } => kernel::pauli_rotation(amps, pauli, factor * params[param]),
            other => other.apply_fixed(amps),
        }
    }

    /// Applies a non-parameterized primitive. All of them are self-inverse.
    #[inline]
    pub(crate) fn apply_fixed(&self, amps: &mut [Complex64]) {
        match *self {
            Primitive::Rotation { .. } => unreachable!("rotation needs an angle"),
            Primitive::Cx { control, target } => kernel::cx(amps, control, target),
            Primitive::Cz { a, b } => kernel::cz(amps, a, b),
            Primitive::Hadamard { bit } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                kernel::matrix_1q(amps, bit, &[h, h, h, -h]);
            }
            Primitive::Pauli { pauli } => kernel::pauli_apply(amps, pauli),
        }
    }
}

pub(crate) fn validate_gate(
    num_qubits: usize,
    gate: GateKind,
    targets: &[usize],
    num_params: usize,
) -> Result<()> {
    if targets.len() != gate.num_targets() {
        return Err(Error::Arity {
            gate: gate.name(),
            what: "targets",
            expected: gate.num_targets(),
            got: targets.len(),
        });
    }
    if num_params != gate.num_params() {
        return Err(Error::Arity {
            gate: gate.name(),
            what: "parameters",
            expected: gate.num_params(),
            got: num_params,
        });
    }
    for (k, &q) in targets.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits,
            });
        }
        if targets[..k].contains(&q) {
            return Err(Error::RepeatedTarget(q));
        }
    }
    Ok(())
}

/// Multiplies `state` by the unitary of `gate` on `targets`.
///
/// For two-qubit gates the first target is the control of `CX`.
pub fn apply_gate(
    state: &mut Statevector,
    gate: GateKind,
    targets: &[usize],
    params: &[f64],
) -> Result<()> {
    validate_gate(state.num_qubits, gate, targets, params.len())?;
    for p in gate.primitives(state.num_qubits, targets) {
        p.apply(&mut state.amps, params);
    }
    Ok(())
}

/// Draws `shots` computational-basis outcomes from `|amplitudes|^2`.
///
/// Keys are basis strings with qubit 0 first. The draw is a sequence of
/// conditional binomials over the basis indices, so it is an exact
/// multinomial sample and deterministic for a given seed.
pub fn sample_counts(state: &Statevector, shots: u64, rng_seed: u64) -> Result<BTreeMap<String, u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let probs = state.probabilities();
    let mut remaining_mass: f64 = probs.iter().sum();
    let mut remaining = shots;
    let mut counts = BTreeMap::new();
    for (idx, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let k = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("probability clamped to [0, 1]")
                .sample(&mut rng)
        };
        if k > 0 {
            counts.insert(state.basis_label(idx), k);
        }
        remaining -= k;
        remaining_mass -= p;
    }
    if remaining > 0 {
        // rounding left mass on the floor; give it to the most likely outcome
        let best = probs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        *counts.entry(state.basis_label(best)).or_insert(0) += remaining;
    }
    Ok(counts)
}

/// `|<a|b>|^2`
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn all_zero_two_qubits() {
        let s = prepare_reference(&ReferenceState::AllZero, 2).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn singlet_pair_amplitudes() {
        let s = prepare_reference(&ReferenceState::SingletPairs, 2).unwrap();
        let r = FRAC_1_SQRT_2;
        let want = [0.0, r, -r, 0.0];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!(close(*a, Complex64::new(w, 0.0)));
        }
    }

    #[test]
    fn all_plus_is_uniform() {
        let s = prepare_reference(&ReferenceState::AllPlus, 2).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, Complex64::new(0.5, 0.0))));
    }

    #[test]
    fn reference_errors() {
        assert!(prepare_reference(&ReferenceState::SingletPairs, 3).is_err());
        assert!(prepare_reference(&ReferenceState::BasisString("01".into()), 3).is_err());
        assert!(prepare_reference(&ReferenceState::BasisString("0a1".into()), 3).is_err());
        assert!(prepare_reference(&ReferenceState::AllZero, 0).is_err());
    }

    #[test]
    fn basis_string_sets_msb_first() {
        let s = prepare_reference(&ReferenceState::BasisString("100".into()), 3).unwrap();
        assert_eq!(s.amplitudes()[4], ONE);
        assert_eq!(s.basis_label(4), "100");
    }

    #[test]
    fn xx_pi_flips_both() {
        let mut s = Statevector::zero(2).unwrap();
        s.apply(GateKind::XX, &[0, 1], &[PI]).unwrap();
        assert!((s.amplitudes()[3].norm_sqr() - 1.0).abs() < 1e-12);
        assert!(close(s.amplitudes()[3], Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn zz_is_a_phase_on_zero() {
        let theta = 0.7;
        let mut s = Statevector::zero(2).unwrap();
        s.apply(GateKind::ZZ, &[0, 1], &[theta]).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::from_polar(1.0, -theta / 2.0)));
        assert!((s.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_argument_errors() {
        let mut s = Statevector::zero(3).unwrap();
        assert!(matches!(
            s.apply(GateKind::CX, &[1, 1], &[]),
            Err(Error::RepeatedTarget(1))
        ));
        assert!(matches!(
            s.apply(GateKind::Rx, &[3], &[0.1]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply(GateKind::Rot, &[0], &[0.1]),
            Err(Error::Arity { .. })
        ));
        assert!(matches!(
            s.apply(GateKind::XX, &[0], &[0.1]),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn cx_control_is_first_target() {
        let mut s = prepare_reference(&ReferenceState::BasisString("10".into()), 2).unwrap();
        s.apply(GateKind::CX, &[0, 1], &[]).unwrap();
        assert_eq!(s.amplitudes()[3], ONE);
    }

    #[test]
    fn deterministic_state_samples_one_outcome() {
        let s = Statevector::zero(2).unwrap();
        let counts = sample_counts(&s, 100, 9).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts["00"], 100);
        assert!(sample_counts(&s, 0, 1).is_err());
    }

    #[test]
    fn plus_state_frequency_within_three_sigma() {
        let s = prepare_reference(&ReferenceState::AllPlus, 1).unwrap();
        let shots = 1_000_000;
        let counts = sample_counts(&s, shots, 42).unwrap();
        let f0 = counts["0"] as f64 / shots as f64;
        assert!((f0 - 0.5).abs() < 3.0 * 0.5 / 1000.0, "f0 = {f0}");
        assert_eq!(counts, sample_counts(&s, shots, 42).unwrap());
        assert_eq!(counts.values().sum::<u64>(), shots);
    }

    #[test]
    fn fidelity_examples() {
        let zero = Statevector::zero(1).unwrap();
        let one = Statevector::basis(1, 1).unwrap();
        let plus = prepare_reference(&ReferenceState::AllPlus, 1).unwrap();
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-12);
        let two = Statevector::zero(2).unwrap();
        assert!(fidelity(&zero, &two).is_err());
    }
}
