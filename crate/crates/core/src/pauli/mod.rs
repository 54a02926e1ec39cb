//! Pauli strings and real-weighted Pauli sums.

mod format;

pub use format::{parse_pauli_file, parse_pauli_str, serialize_pauli_file, write_pauli_file};

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::statevec::kernel::{self, qubit_bit, PauliMask};
use crate::statevec::{mask, PauliLetter, Statevector, MAX_QUBITS};

/// Coefficients at or below this magnitude are dropped after merging.
pub const COEFF_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_qubits: usize,
    mask: PauliMask,
}

impl PauliString {
    pub fn identity(num_qubits: usize) -> Self {
        PauliString {
            num_qubits,
            mask: PauliMask::IDENTITY,
        }
    }

    /// Builds a string from `(qubit, letter)` pairs; repeated qubits are an error.
    pub fn new(num_qubits: usize, letters: &[(usize, PauliLetter)]) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        for (k, &(q, _)) in letters.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
            if letters[..k].iter().any(|&(p, _)| p == q) {
                return Err(Error::RepeatedTarget(q));
            }
        }
        Ok(PauliString {
            num_qubits,
            mask: mask(num_qubits, letters),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub(crate) fn mask(&self) -> PauliMask {
        self.mask
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        let bit = qubit_bit(self.num_qubits, qubit);
        match (self.mask.x & bit != 0, self.mask.z & bit != 0) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = PauliLetter> + '_ {
        (0..self.num_qubits).map(|q| self.letter(q))
    }

    /// Non-identity qubits in increasing order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| self.letter(q) != PauliLetter::I)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.mask == PauliMask::IDENTITY
    }

    /// Number of Y letters; odd counts make the matrix purely imaginary.
    pub fn num_y(&self) -> u32 {
        self.mask.num_y()
    }

    /// `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> Result<(Complex64, PauliString)> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        use PauliLetter::*;
        let i = Complex64::new(0.0, 1.0);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut letters = Vec::new();
        for q in 0..self.num_qubits {
            let (f, l) = match (self.letter(q), other.letter(q)) {
                (I, b) => (Complex64::new(1.0, 0.0), b),
                (a, I) => (Complex64::new(1.0, 0.0), a),
                (a, b) if a == b => (Complex64::new(1.0, 0.0), I),
                (X, Y) => (i, Z),
                (Y, X) => (-i, Z),
                (Y, Z) => (i, X),
                (Z, Y) => (-i, X),
                (Z, X) => (i, Y),
                (X, Z) => (-i, Y),
                _ => unreachable!(),
            };
            phase *= f;
            letters.push((q, l));
        }
        Ok((phase, PauliString::new(self.num_qubits, &letters)?))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let dim = 1usize << self.num_qubits;
        let mut m = DenseMatrix::zeros(dim);
        let ph = self.mask.y_phase();
        for col in 0..dim {
            // P|col> = i^{#Y} (-1)^{|col & z|} |col ^ x>
            m.set(col ^ self.mask.x, col, ph * self.mask.z_sign(col));
        }
        m
    }

    fn order_key(l: PauliLetter) -> u8 {
        match l {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        }
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.num_qubits.cmp(&other.num_qubits).then_with(|| {
            self.letters()
                .map(Self::order_key)
                .cmp(other.letters().map(Self::order_key))
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    /// Sparse form, e.g. `X0 Z2`; empty for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in 0..self.num_qubits {
            let c = match self.letter(q) {
                PauliLetter::I => continue,
                PauliLetter::X => 'X',
                PauliLetter::Y => 'Y',
                PauliLetter::Z => 'Z',
            };
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{c}{q}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

/// A Hermitian operator `sum_k c_k P_k` with real `c_k`.
///
/// Always canonical: duplicate strings merged, near-zero coefficients dropped,
/// terms sorted lexicographically by word (I < X < Y < Z, qubit 0 first).
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        Ok(PauliSum {
            num_qubits,
            terms: Vec::new(),
        })
    }

    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        let mut sum = Self::zero(num_qubits)?;
        let mut raw = Vec::new();
        for (coeff, string) in terms {
            if string.num_qubits != num_qubits {
                return Err(Error::DimensionMismatch {
                    left: num_qubits,
                    right: string.num_qubits,
                });
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient {coeff} on `{string}`"
                )));
            }
            raw.push(PauliTerm { coeff, string });
        }
        sum.terms = canonicalize(raw);
        Ok(sum)
    }

    /// Convenience constructor from `(coeff, [(qubit, letter), ...])` tuples.
    pub fn from_letters(num_qubits: usize, terms: &[(f64, &[(usize, PauliLetter)])]) -> Result<Self> {
        let strings = terms
            .iter()
            .map(|(c, letters)| Ok((*c, PauliString::new(num_qubits, letters)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_qubits, strings)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term has an even number of Y letters, i.e. the matrix
    /// is real symmetric in the computational basis.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.num_y() % 2 == 0)
    }

    pub fn scaled(&self, s: f64) -> PauliSum {
        PauliSum {
            num_qubits: self.num_qubits,
            terms: canonicalize(
                self.terms
                    .iter()
                    .map(|t| PauliTerm {
                        coeff: t.coeff * s,
                        string: t.string,
                    })
                    .collect(),
            ),
        }
    }

    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_qubits(other.num_qubits)?;
        let mut raw = self.terms.clone();
        raw.extend_from_slice(&other.terms);
        Ok(PauliSum {
            num_qubits: self.num_qubits,
            terms: canonicalize(raw),
        })
    }

    /// Operator product. The result must be Hermitian (e.g. a square), otherwise
    /// an imaginary residue is reported as an error.
    pub fn product(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_qubits(other.num_qubits)?;
        let mut acc: Vec<(Complex64, PauliString)> = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let (phase, s) = a.string.mul(&b.string)?;
                acc.push((phase * a.coeff * b.coeff, s));
            }
        }
        acc.sort_by(|x, y| x.1.cmp(&y.1));
        let mut merged: Vec<(Complex64, PauliString)> = Vec::new();
        for (c, s) in acc {
            match merged.last_mut() {
                Some(last) if last.1 == s => last.0 += c,
                _ => merged.push((c, s)),
            }
        }
        let mut raw = Vec::new();
        for (c, s) in merged {
            if c.im.abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "operator product is not Hermitian: term `{s}` has coefficient {c}"
                )));
            }
            raw.push(PauliTerm { coeff: c.re, string: s });
        }
        Ok(PauliSum {
            num_qubits: self.num_qubits,
            terms: canonicalize(raw),
        })
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if self.num_qubits != n {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: n,
            });
        }
        Ok(())
    }

    /// `sum_k c_k <psi|P_k|psi>`, term by term without building `H`.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        self.check_qubits(state.num_qubits())?;
        let amps = state.amplitudes();
        let total: Complex64 = self
            .terms
            .iter()
            .map(|t| kernel::pauli_expectation(amps, t.string.mask) * t.coeff)
            .sum();
        Ok(total.re)
    }

    /// `out += H amps`
    pub fn apply_accumulate(&self, amps: &[Complex64], out: &mut [Complex64]) {
        for t in &self.terms {
            kernel::pauli_accumulate(out, amps, t.string.mask, t.coeff);
        }
    }

    /// `H |psi>` as a raw amplitude vector (not normalized).
    pub fn apply(&self, state: &Statevector) -> Result<Vec<Complex64>> {
        self.check_qubits(state.num_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
        self.apply_accumulate(state.amplitudes(), &mut out);
        Ok(out)
    }

    /// Shot-based estimate with `shots_per_term` measurements of every
    /// non-identity term.
    ///
    /// Measuring `P` after rotating each qubit into its eigenbasis yields the
    /// parity `+1` with probability `(1 + <P>)/2`, independently per shot, so
    /// the count of `+1` outcomes is drawn directly from that binomial.
    pub fn expectation_sampled(&self, state: &Statevector, shots_per_term: u64, rng_seed: u64) -> Result<f64> {
        self.check_qubits(state.num_qubits())?;
        if shots_per_term == 0 {
            return Err(Error::InvalidArgument("shots_per_term must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let amps = state.amplitudes();
        let mut total = 0.0;
        for t in &self.terms {
            if t.string.is_identity() {
                total += t.coeff;
                continue;
            }
            let exact = kernel::pauli_expectation(amps, t.string.mask).re.clamp(-1.0, 1.0);
            let p_plus = 0.5 * (1.0 + exact);
            let plus = if p_plus >= 1.0 {
                shots_per_term
            } else if p_plus <= 0.0 {
                0
            } else {
                Binomial::new(shots_per_term, p_plus)
                    .expect("probability in (0, 1)")
                    .sample(&mut rng)
            };
            let mean = (2.0 * plus as f64 - shots_per_term as f64) / shots_per_term as f64;
            total += t.coeff * mean;
        }
        Ok(total)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let dim = 1usize << self.num_qubits;
        let mut m = DenseMatrix::zeros(dim);
        for t in &self.terms {
            let ph = t.string.mask.y_phase() * t.coeff;
            for col in 0..dim {
                let row = col ^ t.string.mask.x;
                let v = m.get(row, col) + ph * t.string.mask.z_sign(col);
                m.set(row, col, v);
            }
        }
        m
    }
}

fn canonicalize(mut raw: Vec<PauliTerm>) -> Vec<PauliTerm> {
    raw.sort_by(|a, b| a.string.cmp(&b.string));
    let mut out: Vec<PauliTerm> = Vec::with_capacity(raw.len());
    for t in raw {
        match out.last_mut() {
            Some(last) if last.string == t.string => last.coeff += t.coeff,
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coeff.abs() > COEFF_EPS);
    out
}
