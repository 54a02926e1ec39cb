//! Parameterized circuit templates for EHA and the comparison ansatzes.
//!
//! Every template is an ordered gate list. Gate parameters refer to slots of
//! the trainable vector (possibly scaled, possibly shared between gates) or
//! to fixed values. Qubits and bonds are 0-based: the line pattern uses pairs
//! `(0,1), (1,2), ..., (n-2,n-1)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{validate_gate, GateKind, ReferenceState, Statevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    Eha,
    CxLine,
    CxRing,
    CzComplete,
    HvaHm,
    HvaTfim,
    HsaHm,
    HsaTfim,
}

impl AnsatzFamily {
    pub const ALL: [AnsatzFamily; 8] = [
        AnsatzFamily::Eha,
        AnsatzFamily::CxLine,
        AnsatzFamily::CxRing,
        AnsatzFamily::CzComplete,
        AnsatzFamily::HvaHm,
        AnsatzFamily::HvaTfim,
        AnsatzFamily::HsaHm,
        AnsatzFamily::HsaTfim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::Eha => "eha",
            AnsatzFamily::CxLine => "cx_line",
            AnsatzFamily::CxRing => "cx_ring",
            AnsatzFamily::CzComplete => "cz_complete",
            AnsatzFamily::HvaHm => "hva_hm",
            AnsatzFamily::HvaTfim => "hva_tfim",
            AnsatzFamily::HsaHm => "hsa_hm",
            AnsatzFamily::HsaTfim => "hsa_tfim",
        }
    }

    /// Reference state each family is normally started from.
    pub fn default_reference(self) -> ReferenceState {
        match self {
            AnsatzFamily::HvaHm | AnsatzFamily::HsaHm => ReferenceState::SingletPairs,
            AnsatzFamily::HvaTfim | AnsatzFamily::HsaTfim => ReferenceState::AllPlus,
            _ => ReferenceState::AllZero,
        }
    }

    /// Initialization used in the comparison protocol.
    pub fn default_init(self) -> InitScheme {
        match self {
            AnsatzFamily::CzComplete => InitScheme::GaussianInvL { l: None },
            _ => InitScheme::UniformPi,
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnsatzFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown ansatz family `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeaVariant {
    CxLine,
    CxRing,
    CzComplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemModel {
    Hm,
    Tfim,
}

/// Parameter tying inside HSA entanglers for the Heisenberg model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HsaMode {
    /// `theta = phi`, `beta` free: commutes with `S_z`.
    SzConserving,
    /// `theta = phi = beta`: exchange gate, commutes with `S_z` and `S_tot^2`.
    #[default]
    StotConserving,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamRef {
    /// `scale * params[index]`
    Slot { index: usize, scale: f64 },
    Fixed(f64),
}

impl ParamRef {
    fn slot(index: usize) -> Self {
        ParamRef::Slot { index, scale: 1.0 }
    }

    #[inline]
    pub fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            ParamRef::Slot { index, scale } => scale * params[index],
            ParamRef::Fixed(v) => v,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<ParamRef>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircuitTemplate {
    num_qubits: usize,
    family: Option<AnsatzFamily>,
    blocks: usize,
    num_parameters: usize,
    gates: Vec<GateOp>,
    hsa_mode: Option<HsaMode>,
}

/// JSON description used for provenance in run summaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateInfo {
    pub family: Option<AnsatzFamily>,
    pub num_qubits: usize,
    pub blocks: usize,
    pub num_parameters: usize,
    pub num_gates: usize,
    pub cx_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hsa_mode: Option<HsaMode>,
}

impl CircuitTemplate {
    /// An empty circuit; gates are appended with [`CircuitTemplate::push`].
    pub fn empty(num_qubits: usize, num_parameters: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::statevec::MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        Ok(CircuitTemplate {
            num_qubits,
            family: None,
            blocks: 0,
            num_parameters,
            gates: Vec::new(),
            hsa_mode: None,
        })
    }

    pub fn push(&mut self, kind: GateKind, targets: &[usize], params: Vec<ParamRef>) -> Result<()> {
        validate_gate(self.num_qubits, kind, targets, params.len())?;
        for p in &params {
            if let ParamRef::Slot { index, .. } = p {
                if *index >= self.num_parameters {
                    return Err(Error::InvalidArgument(format!(
                        "parameter slot {index} >= {}",
                        self.num_parameters
                    )));
                }
            }
        }
        self.gates.push(GateOp {
            kind,
            targets: targets.to_vec(),
            params,
        });
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn family(&self) -> Option<AnsatzFamily> {
        self.family
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn num_parameters(&self) -> usize {
        self.num_parameters
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn hsa_mode(&self) -> Option<HsaMode> {
        self.hsa_mode
    }

    pub fn default_reference(&self) -> ReferenceState {
        self.family
            .map_or(ReferenceState::AllZero, AnsatzFamily::default_reference)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_parameters {
            return Err(Error::LengthMismatch {
                expected: self.num_parameters,
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Applies `U(params)` to `state` gate by gate.
    pub fn apply(&self, params: &[f64], state: &mut Statevector) -> Result<()> {
        self.check_params(params)?;
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: state.num_qubits(),
            });
        }
        let mut bound = Vec::with_capacity(3);
        for g in &self.gates {
            bound.clear();
            bound.extend(g.params.iter().map(|p| p.resolve(params)));
            for prim in g.kind.primitives(self.num_qubits, &g.targets) {
                prim.apply(state.amplitudes_mut(), &bound);
            }
        }
        Ok(())
    }

    /// `U(params)|reference>`
    pub fn prepare(&self, params: &[f64], reference: &ReferenceState) -> Result<Statevector> {
        let mut s = crate::statevec::prepare_reference(reference, self.num_qubits)?;
        self.apply(params, &mut s)?;
        Ok(s)
    }

    pub fn count_cx(&self) -> usize {
        self.gates.iter().map(|g| g.kind.cx_cost()).sum()
    }

    pub fn describe(&self) -> TemplateInfo {
        TemplateInfo {
            family: self.family,
            num_qubits: self.num_qubits,
            blocks: self.blocks,
            num_parameters: self.num_parameters,
            num_gates: self.gates.len(),
            cx_count: self.count_cx(),
            hsa_mode: self.hsa_mode,
        }
    }

    /// Copy in which every slot occurrence gets its own parameter. Returns the
    /// untied template and, for each new slot, the original slot it came from.
    pub fn untied(&self) -> (CircuitTemplate, Vec<usize>) {
        let mut origin = Vec::new();
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let params = g
                .params
                .iter()
                .map(|p| match *p {
                    ParamRef::Slot { index, scale } => {
                        origin.push(index);
                        ParamRef::Slot {
                            index: origin.len() - 1,
                            scale,
                        }
                    }
                    fixed => fixed,
                })
                .collect();
            gates.push(GateOp {
                kind: g.kind,
                targets: g.targets.clone(),
                params,
            });
        }
        let t = CircuitTemplate {
            num_qubits: self.num_qubits,
            family: self.family,
            blocks: self.blocks,
            num_parameters: origin.len(),
            gates,
            hsa_mode: self.hsa_mode,
        };
        (t, origin)
    }
}

/// Free-function form of [`CircuitTemplate::count_cx`].
pub fn count_cx(template: &CircuitTemplate) -> usize {
    template.count_cx()
}

struct Builder {
    t: CircuitTemplate,
}

impl Builder {
    fn new(family: AnsatzFamily, n: usize, blocks: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("{family} needs at least 2 qubits, got {n}")));
        }
        if blocks == 0 {
            return Err(Error::InvalidArgument(format!("{family} needs at least 1 block")));
        }
        let mut t = CircuitTemplate::empty(n, 0)?;
        t.family = Some(family);
        t.blocks = blocks;
        Ok(Builder { t })
    }

    fn slot(&mut self) -> usize {
        self.t.num_parameters += 1;
        self.t.num_parameters - 1
    }

    fn gate(&mut self, kind: GateKind, targets: &[usize], params: Vec<ParamRef>) {
        self.t
            .push(kind, targets, params)
            .expect("builder emits valid gates");
    }

    fn rot(&mut self, q: usize) {
        let p = [self.slot(), self.slot(), self.slot()];
        self.gate(GateKind::Rot, &[q], p.map(ParamRef::slot).to_vec());
    }

    fn single(&mut self, kind: GateKind, q: usize) {
        let s = self.slot();
        self.gate(kind, &[q], vec![ParamRef::slot(s)]);
    }

    fn finish(self) -> CircuitTemplate {
        self.t
    }
}

fn line(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n - 1).map(|i| (i, i + 1))
}

/// Per block: `Rot` on every qubit, then `XX, YY, ZZ` (each with its own
/// parameter) on each neighbouring pair, left to right.
pub fn build_eha(n: usize, blocks: usize) -> Result<CircuitTemplate> {
    let mut b = Builder::new(AnsatzFamily::Eha, n, blocks)?;
    for _ in 0..blocks {
        for q in 0..n {
            b.rot(q);
        }
        for (i, j) in line(n) {
            for kind in [GateKind::XX, GateKind::YY, GateKind::ZZ] {
                let s = b.slot();
                b.gate(kind, &[i, j], vec![ParamRef::slot(s)]);
            }
        }
    }
    Ok(b.finish())
}

pub fn build_hea(variant: HeaVariant, n: usize, blocks: usize) -> Result<CircuitTemplate> {
    let family = match variant {
        HeaVariant::CxLine => AnsatzFamily::CxLine,
        HeaVariant::CxRing => AnsatzFamily::CxRing,
        HeaVariant::CzComplete => AnsatzFamily::CzComplete,
    };
    let mut b = Builder::new(family, n, blocks)?;
    for _ in 0..blocks {
        match variant {
            HeaVariant::CxLine | HeaVariant::CxRing => {
                for q in 0..n {
                    b.rot(q);
                }
                for (i, j) in line(n) {
                    b.gate(GateKind::CX, &[i, j], vec![]);
                }
                if variant == HeaVariant::CxRing && n > 2 {
                    b.gate(GateKind::CX, &[n - 1, 0], vec![]);
                }
            }
            HeaVariant::CzComplete => {
                // Ry(theta) Rx(phi): Rx acts first
                for q in 0..n {
                    b.single(GateKind::Rx, q);
                    b.single(GateKind::Ry, q);
                }
                for i in 0..n {
                    for j in i + 1..n {
                        b.gate(GateKind::CZ, &[i, j], vec![]);
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

/// Hamiltonian variational ansatz.
///
/// HM (even `n`): four slots per block `[gamma, beta, phi, theta]`; the odd-bond
/// layer `ZZ(theta) YY(phi) XX(phi)` acts first, then the even-bond layer
/// `ZZ(beta) YY(gamma) XX(gamma)`. Even bonds are `(0,1), (2,3), ...`.
/// TFIM: two slots per block, `ZZ(beta)` on every bond then `Rx(gamma)` on
/// every qubit.
pub fn build_hva(model: ProblemModel, n: usize, blocks: usize) -> Result<CircuitTemplate> {
    if n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("HVA needs an even qubit count, got {n}")));
    }
    match model {
        ProblemModel::Hm => {
            let mut b = Builder::new(AnsatzFamily::HvaHm, n, blocks)?;
            let even: Vec<_> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
            let odd: Vec<_> = (0..n / 2 - 1).map(|i| (2 * i + 1, 2 * i + 2)).collect();
            for _ in 0..blocks {
                let [gamma, beta, phi, theta] = [b.slot(), b.slot(), b.slot(), b.slot()];
                let layers = [
                    (&odd, [(GateKind::ZZ, theta), (GateKind::YY, phi), (GateKind::XX, phi)]),
                    (&even, [(GateKind::ZZ, beta), (GateKind::YY, gamma), (GateKind::XX, gamma)]),
                ];
                for (pairs, gates) in layers {
                    for (kind, slot) in gates {
                        for &(i, j) in pairs.iter() {
                            b.gate(kind, &[i, j], vec![ParamRef::slot(slot)]);
                        }
                    }
                }
            }
            Ok(b.finish())
        }
        ProblemModel::Tfim => {
            let mut b = Builder::new(AnsatzFamily::HvaTfim, n, blocks)?;
            for _ in 0..blocks {
                let [beta, gamma] = [b.slot(), b.slot()];
                for (i, j) in line(n) {
                    b.gate(GateKind::ZZ, &[i, j], vec![ParamRef::slot(beta)]);
                }
                for q in 0..n {
                    b.gate(GateKind::Rx, &[q], vec![ParamRef::slot(gamma)]);
                }
            }
            Ok(b.finish())
        }
    }
}

/// Hardware symmetry-preserving ansatz built from NGate entanglers.
///
/// HM: a line of NGates per block, tied according to `mode`. TFIM: per block
/// `NGate(0, 0, beta)` on every bond (an independent `exp(i beta ZZ)`), then an
/// independent `Rx` on every qubit.
pub fn build_hsa(model: ProblemModel, n: usize, blocks: usize, mode: HsaMode) -> Result<CircuitTemplate> {
    match model {
        ProblemModel::Hm => {
            let mut b = Builder::new(AnsatzFamily::HsaHm, n, blocks)?;
            b.t.hsa_mode = Some(mode);
            for _ in 0..blocks {
                for (i, j) in line(n) {
                    let params = match mode {
                        HsaMode::StotConserving => {
                            let s = ParamRef::slot(b.slot());
                            vec![s, s, s]
                        }
                        HsaMode::SzConserving => {
                            let xy = ParamRef::slot(b.slot());
                            let zz = ParamRef::slot(b.slot());
                            vec![xy, xy, zz]
                        }
                    };
                    b.gate(GateKind::NGate, &[i, j], params);
                }
            }
            Ok(b.finish())
        }
        ProblemModel::Tfim => {
            let mut b = Builder::new(AnsatzFamily::HsaTfim, n, blocks)?;
            for _ in 0..blocks {
                for (i, j) in line(n) {
                    let s = b.slot();
                    b.gate(
                        GateKind::NGate,
                        &[i, j],
                        vec![ParamRef::Fixed(0.0), ParamRef::Fixed(0.0), ParamRef::slot(s)],
                    );
                }
                for q in 0..n {
                    b.single(GateKind::Rx, q);
                }
            }
            Ok(b.finish())
        }
    }
}

/// Builds any family; `hsa_mode` only affects `HsaHm`.
pub fn build(family: AnsatzFamily, n: usize, blocks: usize, hsa_mode: HsaMode) -> Result<CircuitTemplate> {
    match family {
        AnsatzFamily::Eha => build_eha(n, blocks),
        AnsatzFamily::CxLine => build_hea(HeaVariant::CxLine, n, blocks),
        AnsatzFamily::CxRing => build_hea(HeaVariant::CxRing, n, blocks),
        AnsatzFamily::CzComplete => build_hea(HeaVariant::CzComplete, n, blocks),
        AnsatzFamily::HvaHm => build_hva(ProblemModel::Hm, n, blocks),
        AnsatzFamily::HvaTfim => build_hva(ProblemModel::Tfim, n, blocks),
        AnsatzFamily::HsaHm => build_hsa(ProblemModel::Hm, n, blocks, hsa_mode),
        AnsatzFamily::HsaTfim => build_hsa(ProblemModel::Tfim, n, blocks, hsa_mode),
    }
}

/// Block counts giving every family roughly the CX budget of an `L`-block EHA.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedBlocks {
    pub eha: usize,
    pub cx_line: usize,
    pub cx_ring: usize,
    pub cz_complete: usize,
    pub hva: usize,
    pub hsa: usize,
}

impl MatchedBlocks {
    pub fn for_family(&self, family: AnsatzFamily) -> usize {
        match family {
            AnsatzFamily::Eha => self.eha,
            AnsatzFamily::CxLine => self.cx_line,
            AnsatzFamily::CxRing => self.cx_ring,
            AnsatzFamily::CzComplete => self.cz_complete,
            AnsatzFamily::HvaHm | AnsatzFamily::HvaTfim => self.hva,
            AnsatzFamily::HsaHm | AnsatzFamily::HsaTfim => self.hsa,
        }
    }

    pub fn as_tuple(&self) -> (usize, usize, usize, usize, usize, usize) {
        (self.eha, self.cx_line, self.cx_ring, self.cz_complete, self.hva, self.hsa)
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// EHA spends `6(n-1)` CX per block; CX-line `n-1`, CX-ring `n`, CZ-complete
/// `n(n-1)/2`, HVA `6(n-1)` and HSA `3(n-1)`.
pub fn matched_blocks(eha_blocks: usize, n: usize) -> Result<MatchedBlocks> {
    if eha_blocks == 0 || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "matched_blocks needs L >= 1 and n >= 2, got L={eha_blocks}, n={n}"
        )));
    }
    let l = eha_blocks;
    Ok(MatchedBlocks {
        eha: l,
        cx_line: 6 * l,
        cx_ring: ceil_div(6 * l * (n - 1), n),
        cz_complete: ceil_div(12 * l, n),
        hva: l,
        hsa: 2 * l,
    })
}

/// Parameter initialization distributions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitScheme {
    /// `U[-pi, pi]`
    UniformPi,
    /// `Normal(0, 1/L)`; `L` defaults to the template's block count.
    #[serde(rename = "gaussian_inv_l")]
    GaussianInvL {
        #[serde(default)]
        l: Option<usize>,
    },
    /// `U[pi/2 - 1/sqrt(L), pi/2 + 1/sqrt(L)]`; `L` defaults to the block count.
    ReducedDomain {
        #[serde(default)]
        l: Option<usize>,
    },
}

impl InitScheme {
    pub fn name(&self) -> &'static str {
        match self {
            InitScheme::UniformPi => "uniform_pi",
            InitScheme::GaussianInvL { .. } => "gaussian_inv_l",
            InitScheme::ReducedDomain { .. } => "reduced_domain",
        }
    }
}

pub fn init_params(template: &CircuitTemplate, scheme: &InitScheme, rng_seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let n = template.num_parameters();
    let depth = |l: &Option<usize>| -> Result<f64> {
        let l = l.unwrap_or(template.blocks());
        if l == 0 {
            return Err(Error::InvalidArgument(format!(
                "{} needs a positive depth L",
                scheme.name()
            )));
        }
        Ok(l as f64)
    };
    let bad = |e: &dyn fmt::Display| Error::InvalidArgument(format!("init distribution: {e}"));
    let v = match scheme {
        InitScheme::UniformPi => {
            let d = Uniform::new_inclusive(-PI, PI).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
        InitScheme::GaussianInvL { l } => {
            let d = Normal::new(0.0, depth(l)?.recip().sqrt()).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
        InitScheme::ReducedDomain { l } => {
            let half = depth(l)?.sqrt().recip();
            let d = Uniform::new_inclusive(FRAC_PI_2 - half, FRAC_PI_2 + half).map_err(|e| bad(&e))?;
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eha_parameter_and_cx_counts() {
        let t = build_eha(12, 10).unwrap();
        assert_eq!(t.num_parameters(), 690);
        assert_eq!(t.count_cx(), 660);
    }

    #[test]
    fn eha_two_qubit_layout() {
        let t = build_eha(2, 1).unwrap();
        let kinds: Vec<_> = t.gates().iter().map(|g| g.kind).collect();
        assert_eq!(
            kinds,
            vec![GateKind::Rot, GateKind::Rot, GateKind::XX, GateKind::YY, GateKind::ZZ]
        );
        assert_eq!(t.num_parameters(), 9);
        assert!(t.gates()[2..].iter().all(|g| g.targets == vec![0, 1]));
    }

    #[test]
    fn hea_counts() {
        assert_eq!(build_hea(HeaVariant::CxLine, 12, 60).unwrap().count_cx(), 660);
        let cz = build_hea(HeaVariant::CzComplete, 12, 4).unwrap();
        assert_eq!(cz.count_cx(), 66 * 4);
        assert_eq!(build_hea(HeaVariant::CzComplete, 12, 10).unwrap().count_cx(), 660);
        let ring = build_hea(HeaVariant::CxRing, 4, 1).unwrap();
        let cx: Vec<_> = ring
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::CX)
            .map(|g| g.targets.clone())
            .collect();
        assert_eq!(cx, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]);
    }

    #[test]
    fn hva_counts_and_errors() {
        let t = build_hva(ProblemModel::Hm, 12, 10).unwrap();
        assert_eq!(t.num_parameters(), 40);
        assert_eq!(t.count_cx(), 6 * 11 * 10);
        assert_eq!(build_hva(ProblemModel::Tfim, 12, 4).unwrap().num_parameters(), 8);
        assert!(build_hva(ProblemModel::Hm, 5, 1).is_err());
    }

    #[test]
    fn hsa_counts() {
        for n in [4, 12] {
            let t = build_hsa(ProblemModel::Hm, n, 3, HsaMode::StotConserving).unwrap();
            assert_eq!(t.count_cx(), 3 * (n - 1) * 3);
        }
        assert_eq!(
            build_hsa(ProblemModel::Hm, 4, 1, HsaMode::SzConserving).unwrap().num_parameters(),
            6
        );
        let t = build_hsa(ProblemModel::Tfim, 12, 8, HsaMode::default()).unwrap();
        assert_eq!(t.num_parameters(), 8 * 23);
    }

    #[test]
    fn matched_block_tuples() {
        assert_eq!(matched_blocks(10, 12).unwrap().as_tuple(), (10, 60, 55, 10, 10, 20));
        assert_eq!(matched_blocks(4, 12).unwrap().as_tuple(), (4, 24, 22, 4, 4, 8));
        assert_eq!(matched_blocks(1, 2).unwrap().as_tuple(), (1, 6, 3, 6, 1, 2));
        assert!(matched_blocks(0, 12).is_err());
    }

    #[test]
    fn empty_template_has_no_cx() {
        assert_eq!(CircuitTemplate::empty(3, 0).unwrap().count_cx(), 0);
    }

    #[test]
    fn reduced_domain_bounds() {
        let t = build_eha(4, 26).unwrap();
        let p = init_params(&t, &InitScheme::ReducedDomain { l: None }, 5).unwrap();
        let half = 1.0 / 26f64.sqrt();
        assert!(p.iter().all(|&x| x >= FRAC_PI_2 - half && x <= FRAC_PI_2 + half));
    }

    #[test]
    fn uniform_mean_near_zero_and_deterministic() {
        let mut t = CircuitTemplate::empty(2, 100_000).unwrap();
        t.blocks = 1;
        let p = init_params(&t, &InitScheme::UniformPi, 11).unwrap();
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert_eq!(p, init_params(&t, &InitScheme::UniformPi, 11).unwrap());
        assert_ne!(p, init_params(&t, &InitScheme::UniformPi, 12).unwrap());
    }

    #[test]
    fn gaussian_variance_is_inverse_depth() {
        let mut t = CircuitTemplate::empty(2, 200_000).unwrap();
        t.blocks = 4;
        let p = init_params(&t, &InitScheme::GaussianInvL { l: None }, 3).unwrap();
        let var = p.iter().map(|x| x * x).sum::<f64>() / p.len() as f64;
        assert!((var - 0.25).abs() < 0.01, "var {var}");
    }

    #[test]
    fn untied_clone_expands_shared_slots() {
        let t = build_hva(ProblemModel::Hm, 4, 1).unwrap();
        let (u, origin) = t.untied();
        assert_eq!(u.num_parameters(), t.gates().len());
        assert_eq!(origin.len(), u.num_parameters());
    }

    #[test]
    fn family_names_roundtrip() {
        for f in AnsatzFamily::ALL {
            assert_eq!(f.name().parse::<AnsatzFamily>().unwrap(), f);
        }
    }
}
