use thiserror::Error;

use crate::compiler::GateKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gate is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("register of {0} qubits is not supported (1..=5)")]
    RegisterSize(usize),

    #[error("CNOT control and target are both qubit {0}")]
    SameControlTarget(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("amplitudes are not normalised (norm² = {0})")]
    NotNormalised(f64),

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("cell (qubit {qubit}, slot {slot}) is already occupied")]
    CellOccupied { qubit: usize, slot: usize },

    #[error("{kind} on qubit {qubit} at slot {slot} would follow its measurement")]
    GateAfterMeasurement {
        kind: GateKind,
        qubit: usize,
        slot: usize,
    },

    #[error("no room for countermeasure at qubit {qubit}, slots {start}..{end}")]
    NoRoom {
        qubit: usize,
        start: usize,
        end: usize,
    },

    #[error("no H pair at qubit {qubit}, slots {first} and {second}")]
    InvalidSite {
        qubit: usize,
        first: usize,
        second: usize,
    },

    #[error("line {line}: {message}")]
    Qasm { line: usize, message: String },

    #[error("device gateset cannot realise theta = {0} (only -3π/4)")]
    UnsupportedTheta(f64),

    #[error("role {0} is not bound to a measured qubit")]
    MissingRole(String),

    #[error("noise kick names measurement {0}, which the circuit does not contain")]
    KickSiteAbsent(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),

    #[error("circuit violates device constraints: {0}")]
    DeviceViolation(String),
}
