use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Circuit, GateKind};

/// Hardware restrictions of the five-qubit device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConstraints {
    pub n_qubits: usize,
    /// Every CNOT must flip this qubit.
    pub cnot_target: usize,
    pub allowed_kinds: Vec<GateKind>,
    pub max_measurements_per_qubit: usize,
}

impl Default for DeviceConstraints {
    fn default() -> Self {
        Self {
            n_qubits: 5,
            cnot_target: 2,
            allowed_kinds: GateKind::DEVICE.to_vec(),
            max_measurements_per_qubit: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    CnotTarget,
    MaxMeasurements,
    GateKind,
    RegisterSize,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::CnotTarget => "cnot_target",
            Rule::MaxMeasurements => "max_measurements",
            Rule::GateKind => "gate_kind",
            Rule::RegisterSize => "register_size",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub qubit: usize,
    pub slot: Option<usize>,
    pub gate: Option<GateKind>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: qubit {}", self.rule, self.qubit)?;
        if let Some(slot) = self.slot {
            write!(f, ", slot {slot}")?;
        }
        if let Some(gate) = self.gate {
            write!(f, ", gate {gate}")?;
        }
        Ok(())
    }
}

/// Lists every way `circuit` breaks `device`; empty means device-legal.
pub fn validate(circuit: &Circuit, device: &DeviceConstraints) -> Vec<Violation> {
    let mut out = Vec::new();
    if circuit.n_qubits() > device.n_qubits {
        out.push(Violation {
            rule: Rule::RegisterSize,
            qubit: circuit.n_qubits() - 1,
            slot: None,
            gate: None,
        });
    }
    for g in circuit.gates() {
        let allowed = device.allowed_kinds.iter().any(|k| match (k, g.kind) {
            (GateKind::Rx(_), GateKind::Rx(_)) => true,
            (a, b) => *a == b,
        });
        if !allowed {
            out.push(Violation {
                rule: Rule::GateKind,
                qubit: g.target,
                slot: Some(g.slot),
                gate: Some(g.kind),
            });
        }
        if g.kind == GateKind::Cnot && g.target != device.cnot_target {
            out.push(Violation {
                rule: Rule::CnotTarget,
                qubit: g.target,
                slot: Some(g.slot),
                gate: Some(g.kind),
            });
        }
    }
    for q in circuit.measured_qubits() {
        let n = circuit.measurements().iter().filter(|&&m| m == q).count();
        if n > device.max_measurements_per_qubit {
            out.push(Violation {
                rule: Rule::MaxMeasurements,
                qubit: q,
                slot: Some(circuit.n_slots()),
                gate: None,
            });
        }
    }
    out
}
