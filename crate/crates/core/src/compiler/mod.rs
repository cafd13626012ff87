//! Slot-grid circuits for a five-qubit device, device validation, an
//! emulation of the vendor compiler's peephole behaviour and a small
//! OpenQASM 2 subset.

mod circuit;
mod passes;
pub mod qasm;
mod validate;

pub use circuit::{Circuit, Gate, GateKind};
pub use passes::{
    compile, insert_countermeasures, pass_collapse_hh, pass_hoist, HhSite, PinWindow,
};
pub use qasm::{from_qasm, to_qasm};
pub use validate::{validate, DeviceConstraints, Rule, Violation};
