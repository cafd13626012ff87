mod common;

use common::{phase_free_distance, random_device_circuit};
use lg_core::compiler::{compile, from_qasm, to_qasm, validate, DeviceConstraints};
use lg_core::protocols::{build_protocol, GatesetMode, ProtocolId};
use lg_core::DEVICE_THETA;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circuit(seed: u64, n_qubits: usize, depth: usize) -> lg_core::compiler::Circuit {
    random_device_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n_qubits, depth)
}

proptest! {
    #[test]
    fn generated_circuits_are_device_legal(seed: u64, depth in 1usize..24) {
        let c = circuit(seed, 5, depth);
        prop_assert!(validate(&c, &DeviceConstraints::default()).is_empty());
    }

    #[test]
    fn compile_is_idempotent(seed: u64, depth in 1usize..24) {
        let once = compile(&circuit(seed, 5, depth));
        prop_assert_eq!(compile(&once), once);
    }

    #[test]
    fn compile_preserves_unitary(seed: u64, depth in 1usize..16) {
        let c = circuit(seed, 3, depth);
        let d = phase_free_distance(&c.unitary(), &compile(&c).unitary());
        prop_assert!(d < 1e-12, "distance {}", d);
    }

    #[test]
    fn qasm_round_trip(seed: u64, depth in 0usize..24) {
        let c = circuit(seed, 5, depth);
        let back = from_qasm(&to_qasm(&c)).unwrap();
        prop_assert!(back.same_order_as(&c));
        prop_assert_eq!(to_qasm(&back), to_qasm(&c.normalized()));
    }

    #[test]
    fn compiled_circuits_stay_legal(seed: u64, depth in 1usize..24) {
        let c = compile(&circuit(seed, 5, depth));
        prop_assert!(validate(&c, &DeviceConstraints::default()).is_empty());
    }
}

#[test]
fn every_protocol_validates_and_is_a_fixpoint() {
    for id in ProtocolId::ALL {
        let pc = build_protocol(id, DEVICE_THETA, GatesetMode::Device).unwrap();
        assert!(
            validate(&pc.circuit, &DeviceConstraints::default()).is_empty(),
            "{id}"
        );
        assert_eq!(compile(&pc.circuit), pc.circuit, "{id}");
    }
}

#[test]
fn exported_protocols_round_trip() {
    for id in ProtocolId::ALL {
        let pc = build_protocol(id, DEVICE_THETA, GatesetMode::Device).unwrap();
        let text = to_qasm(&pc.circuit);
        assert!(from_qasm(&text).unwrap().same_order_as(&pc.circuit), "{id}");
    }
    let f = build_protocol(ProtocolId::F, DEVICE_THETA, GatesetMode::Device).unwrap();
    let cx = to_qasm(&f.circuit)
        .lines()
        .filter(|l| l.starts_with("cx "))
        .count();
    assert_eq!(cx, 4);
}
