//! Exact simulation of small registers.
//!
//! Basis states are indexed little-endian: qubit `Q0` is the least
//! significant bit of the amplitude index. A measured bit `1` is reported as
//! the dichotomous value `+1` and a bit `0` as `−1`, so the operational
//! expectation of a z-measurement is `−⟨σ_z⟩`.

mod density;
pub mod gates;
mod observable;
mod sampling;
mod state;

pub use density::{completeness_deviation, dephase_operator, DensityMatrix};
pub use gates::Matrix2;
pub use observable::Observable;
pub use sampling::{sample_distribution, Counts};
pub use state::StateVector;

use crate::{Error, Result, MAX_QUBITS};

pub(crate) fn check_register(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::RegisterSize(n_qubits))
    }
}

pub(crate) fn check_qubit(q: usize, n_qubits: usize) -> Result<()> {
    if q < n_qubits {
        Ok(())
    } else {
        Err(Error::QubitOutOfRange { qubit: q, n_qubits })
    }
}

/// Operational ±1 value of bit `q` in basis index `index`.
pub fn bit_value(index: usize, q: usize) -> i8 {
    if (index >> q) & 1 == 1 {
        1
    } else {
        -1
    }
}
