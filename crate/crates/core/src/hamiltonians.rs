//! Benchmark Hamiltonians and the symmetry / penalty operators used with them.
//!
//! Sites are 0-based here; site `i` is qubit `i`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{parse_pauli_file, PauliString, PauliSum};
use crate::statevec::{PauliLetter, Statevector};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Boundary that reproduces the published 8- and 12-site Heisenberg ground
/// energies (-13.4997, -20.5684); the periodic chain gives -14.6044, -21.5496.
pub const HM_CALIBRATED_BOUNDARY: Boundary = Boundary::Open;

/// Model description as it appears in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Hm {
        sites: usize,
        #[serde(default = "one")]
        j: f64,
        #[serde(default)]
        boundary: Boundary,
    },
    Tfim {
        sites: usize,
        jz: f64,
        hx: f64,
    },
    Bhm {
        sites: usize,
        #[serde(default = "one")]
        t: f64,
        #[serde(default = "seven")]
        u: f64,
        #[serde(default = "two")]
        cutoff: usize,
    },
    External {
        path: PathBuf,
    },
}

fn one() -> f64 {
    1.0
}
fn seven() -> f64 {
    7.0
}
fn two() -> usize {
    2
}

impl ModelSpec {
    pub fn build(&self) -> Result<PauliSum> {
        match self {
            ModelSpec::Hm { sites, j, boundary } => build_hm(*sites, *j, *boundary),
            ModelSpec::Tfim { sites, jz, hx } => build_tfim(*sites, *jz, *hx),
            ModelSpec::Bhm { sites, t, u, cutoff } => build_bhm(*sites, *t, *u, *cutoff),
            ModelSpec::External { path } => parse_pauli_file(path),
        }
    }

    /// Short label such as `HM(12)`.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Hm { sites, .. } => format!("HM({sites})"),
            ModelSpec::Tfim { sites, jz, hx } => format!("TFIM({sites}; jz={jz}, hx={hx})"),
            ModelSpec::Bhm { sites, .. } => format!("BHM({sites})"),
            ModelSpec::External { path } => format!("external({})", path.display()),
        }
    }

    /// Resolves `path` of external models against `base`.
    pub fn resolve_paths(&mut self, base: &std::path::Path) {
        if let ModelSpec::External { path } = self {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("chain needs at least 2 sites, got {n}")));
    }
    Ok(())
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    let mut b: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic && n > 2 {
        b.push((n - 1, 0));
    }
    b
}

fn two_site(n: usize, a: usize, b: usize, letter: PauliLetter) -> Result<PauliString> {
    PauliString::new(n, &[(a, letter), (b, letter)])
}

/// `J sum_bonds (XX + YY + ZZ)`
pub fn build_hm(n: usize, j: f64, boundary: Boundary) -> Result<PauliSum> {
    check_sites(n)?;
    let mut terms = Vec::new();
    for (a, b) in bonds(n, boundary) {
        for l in [PauliLetter::X, PauliLetter::Y, PauliLetter::Z] {
            terms.push((j, two_site(n, a, b, l)?));
        }
    }
    PauliSum::new(n, terms)
}

/// `jz sum_{i<n-1} Z_i Z_{i+1} + hx sum_i X_i` on an open chain.
pub fn build_tfim(n: usize, jz: f64, hx: f64) -> Result<PauliSum> {
    check_sites(n)?;
    let mut terms = Vec::new();
    for (a, b) in bonds(n, Boundary::Open) {
        terms.push((jz, two_site(n, a, b, PauliLetter::Z)?));
    }
    for i in 0..n {
        terms.push((hx, PauliString::new(n, &[(i, PauliLetter::X)])?));
    }
    PauliSum::new(n, terms)
}

/// Bose-Hubbard chain `-t sum (b_i^dag b_{i+1} + h.c.) + u sum n_i (n_i - 1)`
/// under the binary mapping with two levels per site (one qubit each).
///
/// With `b = |0><1|` the hopping becomes `-(t/2) sum (XX + YY)` and the
/// on-site term is identically zero.
pub fn build_bhm(n: usize, t: f64, u: f64, cutoff: usize) -> Result<PauliSum> {
    check_sites(n)?;
    if cutoff != 2 {
        return Err(Error::Unsupported(format!(
            "Bose-Hubbard cutoff {cutoff} unsupported; only 2 levels per site are implemented"
        )));
    }
    let _ = u; // n(n-1) vanishes on {0, 1}
    let mut terms = Vec::new();
    for (a, b) in bonds(n, Boundary::Open) {
        terms.push((-0.5 * t, two_site(n, a, b, PauliLetter::X)?));
        terms.push((-0.5 * t, two_site(n, a, b, PauliLetter::Y)?));
    }
    PauliSum::new(n, terms)
}

#[derive(Clone, Debug)]
pub struct SymmetryOps {
    pub s_x: PauliSum,
    pub s_y: PauliSum,
    pub s_z: PauliSum,
    pub s_tot_sq: PauliSum,
    /// `sum_i (I - Z_i)/2`, counts qubits in `|1>`.
    pub number_op: PauliSum,
}

fn spin_component(n: usize, letter: PauliLetter) -> Result<PauliSum> {
    let terms = (0..n)
        .map(|i| Ok((0.5, PauliString::new(n, &[(i, letter)])?)))
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(n, terms)
}

pub fn build_symmetry_ops(n: usize) -> Result<SymmetryOps> {
    let s_x = spin_component(n, PauliLetter::X)?;
    let s_y = spin_component(n, PauliLetter::Y)?;
    let s_z = spin_component(n, PauliLetter::Z)?;
    let s_tot_sq = s_x
        .product(&s_x)?
        .plus(&s_y.product(&s_y)?)?
        .plus(&s_z.product(&s_z)?)?;
    let mut number_terms = vec![(0.5 * n as f64, PauliString::identity(n))];
    for i in 0..n {
        number_terms.push((-0.5, PauliString::new(n, &[(i, PauliLetter::Z)])?));
    }
    let number_op = PauliSum::new(n, number_terms)?;
    Ok(SymmetryOps {
        s_x,
        s_y,
        s_z,
        s_tot_sq,
        number_op,
    })
}

/// `<H> + beta (<C> - target)^2`
pub fn penalized_cost(
    h: &PauliSum,
    constraint: &PauliSum,
    target: f64,
    beta: f64,
    state: &Statevector,
) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("penalty weight must be >= 0, got {beta}")));
    }
    let e = h.expectation(state)?;
    let c = constraint.expectation(state)?;
    Ok(e + beta * (c - target).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::{prepare_reference, ReferenceState};

    #[test]
    fn hm_two_sites_has_three_terms() {
        let h = build_hm(2, 1.0, Boundary::Open).unwrap();
        assert_eq!(h.len(), 3);
        let singlet = prepare_reference(&ReferenceState::SingletPairs, 2).unwrap();
        assert!((h.expectation(&singlet).unwrap() + 3.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_adds_closing_bond() {
        assert_eq!(build_hm(4, 1.0, Boundary::Open).unwrap().len(), 9);
        assert_eq!(build_hm(4, 1.0, Boundary::Periodic).unwrap().len(), 12);
        assert!(build_hm(1, 1.0, Boundary::Open).is_err());
    }

    #[test]
    fn tfim_term_count() {
        let h = build_tfim(12, -1.0, 3.5).unwrap();
        assert_eq!(h.len(), 11 + 12);
    }

    #[test]
    fn bhm_rejects_other_cutoffs() {
        assert!(matches!(build_bhm(4, 1.0, 7.0, 3), Err(Error::Unsupported(_))));
        assert_eq!(build_bhm(4, 1.0, 7.0, 2).unwrap().len(), 6);
    }

    #[test]
    fn singlet_symmetry_expectations() {
        let ops = build_symmetry_ops(2).unwrap();
        let s = prepare_reference(&ReferenceState::SingletPairs, 2).unwrap();
        assert!(ops.s_z.expectation(&s).unwrap().abs() < 1e-12);
        assert!(ops.s_tot_sq.expectation(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn number_op_counts_excitations() {
        let ops = build_symmetry_ops(4).unwrap();
        let s = prepare_reference(&ReferenceState::BasisString("1100".into()), 4).unwrap();
        assert!((ops.number_op.expectation(&s).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn s_tot_sq_on_triplet_is_two() {
        // |00> is in the s = 1 triplet: S^2 = s(s+1) = 2
        let ops = build_symmetry_ops(2).unwrap();
        let s = Statevector::zero(2).unwrap();
        assert!((ops.s_tot_sq.expectation(&s).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn penalty_reduces_to_energy() {
        let h = build_hm(4, 1.0, Boundary::Open).unwrap();
        let ops = build_symmetry_ops(4).unwrap();
        let s = prepare_reference(&ReferenceState::SingletPairs, 4).unwrap();
        let e = h.expectation(&s).unwrap();
        assert_eq!(penalized_cost(&h, &ops.number_op, 2.0, 0.0, &s).unwrap(), e);
        // singlet pairs carry exactly one excitation per pair: <N> = 2
        let c = penalized_cost(&h, &ops.number_op, 2.0, 10.0, &s).unwrap();
        assert!((c - e).abs() < 1e-12);
        assert!(penalized_cost(&h, &ops.number_op, 2.0, -1.0, &s).is_err());
    }
}
