//! CX-level circuits for the two-qubit entanglers.
//!
//! These are the hardware realizations whose CX counts feed
//! [`GateKind::cx_cost`]: two CX for each of XX/YY/ZZ and three for the
//! NGate. They are equal to the native gates up to a global phase.

use std::f64::consts::FRAC_PI_2;

use super::GateKind;

#[derive(Clone, Debug, PartialEq)]
pub struct GateCall {
    pub gate: GateKind,
    pub targets: Vec<usize>,
    pub params: Vec<f64>,
}

fn call(gate: GateKind, targets: &[usize], params: &[f64]) -> GateCall {
    GateCall {
        gate,
        targets: targets.to_vec(),
        params: params.to_vec(),
    }
}

/// Basis change, CX, Rz(theta), CX, inverse basis change.
///
/// Only XX, YY and ZZ are accepted; anything else returns `None`.
pub fn entangler_circuit(gate: GateKind, a: usize, b: usize, theta: f64) -> Option<Vec<GateCall>> {
    let core = [
        call(GateKind::CX, &[a, b], &[]),
        call(GateKind::Rz, &[b], &[theta]),
        call(GateKind::CX, &[a, b], &[]),
    ];
    let (pre, post): (Vec<GateCall>, Vec<GateCall>) = match gate {
        GateKind::ZZ => (vec![], vec![]),
        GateKind::XX => (
            vec![call(GateKind::H, &[a], &[]), call(GateKind::H, &[b], &[])],
            vec![call(GateKind::H, &[a], &[]), call(GateKind::H, &[b], &[])],
        ),
        GateKind::YY => (
            vec![
                call(GateKind::Rx, &[a], &[FRAC_PI_2]),
                call(GateKind::Rx, &[b], &[FRAC_PI_2]),
            ],
            vec![
                call(GateKind::Rx, &[a], &[-FRAC_PI_2]),
                call(GateKind::Rx, &[b], &[-FRAC_PI_2]),
            ],
        ),
        _ => return None,
    };
    Some(pre.into_iter().chain(core).chain(post).collect())
}

/// Three-CX circuit for `exp(i(theta XX + phi YY + beta ZZ))` on `(a, b)`.
pub fn ngate_circuit(a: usize, b: usize, theta: f64, phi: f64, beta: f64) -> Vec<GateCall> {
    vec![
        call(GateKind::Rz, &[b], &[FRAC_PI_2]),
        call(GateKind::CX, &[b, a], &[]),
        call(GateKind::Rz, &[a], &[FRAC_PI_2 - 2.0 * beta]),
        call(GateKind::Ry, &[b], &[FRAC_PI_2 - 2.0 * theta]),
        call(GateKind::CX, &[a, b], &[]),
        call(GateKind::Ry, &[b], &[2.0 * phi - FRAC_PI_2]),
        call(GateKind::CX, &[b, a], &[]),
        call(GateKind::Rz, &[a], &[-FRAC_PI_2]),
    ]
}

pub fn count_cx(circuit: &[GateCall]) -> usize {
    circuit
        .iter()
        .filter(|c| matches!(c.gate, GateKind::CX | GateKind::CZ))
        .count()
}
