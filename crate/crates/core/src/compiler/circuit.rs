use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qsim::{gates, Matrix2};
use crate::{Error, Result, MAX_QUBITS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Id,
    /// `exp(−i φ σ_x / 2)`; only available in the ideal gateset.
    Rx(f64),
    Cnot,
}

impl GateKind {
    /// The ten kinds the device accepts.
    pub const DEVICE: [GateKind; 10] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Id,
        GateKind::Cnot,
    ];

    pub fn is_two_qubit(self) -> bool {
        self == GateKind::Cnot
    }

    /// Timing-only gates: no pulse is played for them.
    pub fn is_timing(self) -> bool {
        matches!(self, GateKind::Id | GateKind::T | GateKind::Tdg)
    }

    pub fn qasm_name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Id => "id",
            GateKind::Rx(_) => "rx",
            GateKind::Cnot => "cx",
        }
    }

    /// Matrix of a single-qubit kind; `None` for CNOT.
    pub fn matrix(self) -> Option<Matrix2<f64>> {
        Some(match self {
            GateKind::X => gates::x(),
            GateKind::Y => gates::y(),
            GateKind::Z => gates::z(),
            GateKind::H => gates::h(),
            GateKind::S => gates::s(),
            GateKind::Sdg => gates::sdg(),
            GateKind::T => gates::t(),
            GateKind::Tdg => gates::tdg(),
            GateKind::Id => gates::identity(),
            GateKind::Rx(phi) => gates::rx(phi),
            GateKind::Cnot => return None,
        })
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Rx(phi) => write!(f, "rx({phi:?})"),
            other => f.write_str(other.qasm_name()),
        }
    }
}

/// A gate placed in one time slot. For CNOT, `control` is set and `target`
/// is the flipped qubit; single-qubit gates only use `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub control: Option<usize>,
    pub slot: usize,
}

impl Gate {
    pub fn single(kind: GateKind, qubit: usize, slot: usize) -> Self {
        debug_assert!(!kind.is_two_qubit());
        Self {
            kind,
            target: qubit,
            control: None,
            slot,
        }
    }

    pub fn cnot(control: usize, target: usize, slot: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            slot,
        }
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        self.control.into_iter().chain(std::iter::once(self.target))
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.target == q || self.control == Some(q)
    }

    fn sort_key(&self) -> (usize, usize) {
        (self.slot, self.qubits().min().unwrap_or(0))
    }
}

/// Time-slotted gate grid with terminal z measurements.
///
/// Each `(qubit, slot)` cell holds at most one gate; a CNOT occupies the same
/// slot on both of its qubits. All measurements happen after slot
/// `n_slots − 1`. Measurements are kept as a list, not a set, so that
/// [`validate`](super::validate) can report repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    n_slots: usize,
    gates: Vec<Gate>,
    measurements: Vec<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::RegisterSize(n_qubits));
        }
        Ok(Self {
            n_qubits,
            n_slots: 0,
            gates: Vec::new(),
            measurements: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Duration in slots; measurements follow the last slot.
    pub fn n_slots(&self) -> usize {
        self.n_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measurements(&self) -> &[usize] {
        &self.measurements
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// Extends the duration to at least `n_slots`.
    pub fn pad_to(&mut self, n_slots: usize) {
        self.n_slots = self.n_slots.max(n_slots);
    }

    pub fn cell(&self, qubit: usize, slot: usize) -> Option<&Gate> {
        self.gates
            .iter()
            .find(|g| g.slot == slot && g.acts_on(qubit))
    }

    pub fn is_free(&self, qubit: usize, slot: usize) -> bool {
        self.cell(qubit, slot).is_none()
    }

    /// Gates touching `qubit`, in slot order.
    pub fn gates_on(&self, qubit: usize) -> Vec<Gate> {
        self.gates
            .iter()
            .filter(|g| g.acts_on(qubit))
            .copied()
            .collect()
    }

    pub fn add(&mut self, gate: Gate) -> Result<()> {
        for q in gate.qubits() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: self.n_qubits,
                });
            }
            if !self.is_free(q, gate.slot) {
                return Err(Error::CellOccupied {
                    qubit: q,
                    slot: gate.slot,
                });
            }
        }
        if gate.control == Some(gate.target) {
            return Err(Error::SameControlTarget(gate.target));
        }
        if gate.kind.is_two_qubit() != gate.control.is_some() {
            return Err(Error::DeviceViolation(format!(
                "{} has the wrong number of operands",
                gate.kind
            )));
        }
        self.n_slots = self.n_slots.max(gate.slot + 1);
        let pos = self
            .gates
            .partition_point(|g| g.sort_key() <= gate.sort_key());
        self.gates.insert(pos, gate);
        Ok(())
    }

    /// Terminal z measurement of `qubit`.
    pub fn measure(&mut self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        self.measurements.push(qubit);
        Ok(())
    }

    /// Distinct measured qubits in ascending order.
    pub fn measured_qubits(&self) -> Vec<usize> {
        let mut m = self.measurements.clone();
        m.sort_unstable();
        m.dedup();
        m
    }

    pub(crate) fn remove_at(&mut self, qubit: usize, slot: usize) -> Option<Gate> {
        let idx = self
            .gates
            .iter()
            .position(|g| g.slot == slot && g.acts_on(qubit))?;
        Some(self.gates.remove(idx))
    }

    /// The same circuit rescheduled as-soon-as-possible: per-qubit gate order
    /// and CNOT alignment are kept, idle cells before each gate are dropped
    /// and the duration becomes the resulting depth.
    pub fn normalized(&self) -> Circuit {
        let mut frontier = vec![0usize; self.n_qubits];
        let mut out = Circuit {
            n_qubits: self.n_qubits,
            n_slots: 0,
            gates: Vec::with_capacity(self.gates.len()),
            measurements: self.measured_qubits(),
        };
        for g in &self.gates {
            let slot = g.qubits().map(|q| frontier[q]).max().unwrap_or(0);
            for q in g.qubits() {
                frontier[q] = slot + 1;
            }
            out.add(Gate { slot, ..*g })
                .expect("ASAP placement is conflict-free");
        }
        out
    }

    /// Equality up to slot renumbering that keeps per-qubit order and CNOT
    /// alignment.
    pub fn same_order_as(&self, other: &Circuit) -> bool {
        self.normalized() == other.normalized()
    }

    /// Dense unitary of the gate grid, little-endian, row-major.
    pub fn unitary(&self) -> Vec<num_complex::Complex64> {
        use num_complex::Complex64;
        let dim = 1usize << self.n_qubits;
        let mut u = vec![Complex64::new(0.0, 0.0); dim * dim];
        for col in 0..dim {
            let mut state = crate::StateVector::basis(self.n_qubits, col).expect("valid basis");
            for g in &self.gates {
                match (g.kind.matrix(), g.control) {
                    (Some(m), None) => state.apply_1q(&m, g.target).expect("unitary gate"),
                    (None, Some(c)) => state.apply_cnot(c, g.target).expect("valid cnot"),
                    _ => unreachable!("operand count checked on insertion"),
                }
            }
            for (row, a) in state.amplitudes().iter().enumerate() {
                u[row * dim + col] = *a;
            }
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlapping_cells() {
        let mut c = Circuit::new(3).unwrap();
        c.add(Gate::cnot(0, 2, 1)).unwrap();
        assert_eq!(
            c.add(Gate::single(GateKind::H, 2, 1)),
            Err(Error::CellOccupied { qubit: 2, slot: 1 })
        );
        assert!(c.add(Gate::single(GateKind::H, 1, 1)).is_ok());
        assert_eq!(c.add(Gate::cnot(1, 1, 4)), Err(Error::SameControlTarget(1)));
        assert!(c.add(Gate::single(GateKind::X, 3, 0)).is_err());
    }

    #[test]
    fn gates_are_kept_in_slot_order() {
        let mut c = Circuit::new(2).unwrap();
        c.add(Gate::single(GateKind::H, 1, 5)).unwrap();
        c.add(Gate::single(GateKind::X, 0, 2)).unwrap();
        c.add(Gate::single(GateKind::T, 1, 2)).unwrap();
        let slots: Vec<_> = c.gates().iter().map(|g| (g.slot, g.target)).collect();
        assert_eq!(slots, vec![(2, 0), (2, 1), (5, 1)]);
        assert_eq!(c.n_slots(), 6);
    }

    #[test]
    fn normalized_drops_leading_idle_cells() {
        let mut c = Circuit::new(2).unwrap();
        c.add(Gate::single(GateKind::H, 1, 4)).unwrap();
        c.add(Gate::cnot(1, 0, 6)).unwrap();
        let n = c.normalized();
        assert_eq!(n.gates()[0].slot, 0);
        assert_eq!(n.gates()[1].slot, 1);
        assert!(c.same_order_as(&n));
    }
}
