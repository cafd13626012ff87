#![allow(dead_code)]

use lg_core::compiler::{Circuit, Gate, GateKind};
use lg_core::protocols::SYSTEM_QUBIT;
use rand::seq::SliceRandom;
use rand::Rng;

const SINGLE: [GateKind; 9] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::Id,
];

/// A random circuit that passes device validation: device kinds only,
/// CNOTs into the system qubit, each qubit measured at most once. H is
/// over-weighted so HH pairs are common.
pub fn random_device_circuit<R: Rng>(rng: &mut R, n_qubits: usize, depth: usize) -> Circuit {
    assert!(n_qubits > SYSTEM_QUBIT);
    let mut c = Circuit::new(n_qubits).unwrap();
    for slot in 0..depth {
        if rng.gen_bool(0.3) {
            let control = loop {
                let q = rng.gen_range(0..n_qubits);
                if q != SYSTEM_QUBIT {
                    break q;
                }
            };
            c.add(Gate::cnot(control, SYSTEM_QUBIT, slot)).unwrap();
        }
        for q in 0..n_qubits {
            if !c.is_free(q, slot) || rng.gen_bool(0.35) {
                continue;
            }
            let kind = if rng.gen_bool(0.4) {
                GateKind::H
            } else {
                *SINGLE.choose(rng).unwrap()
            };
            c.add(Gate::single(kind, q, slot)).unwrap();
        }
    }
    c.pad_to(depth);
    for q in 0..n_qubits {
        if rng.gen_bool(0.6) {
            c.measure(q).unwrap();
        }
    }
    c
}

/// Largest entry-wise distance between two unitaries after removing the
/// global phase.
pub fn phase_free_distance(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let (k, _) = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .unwrap();
    let phase = b[k] / a[k];
    let phase = phase / phase.norm();
    a.iter()
        .zip(b)
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max)
}
