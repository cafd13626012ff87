//! Simulation and analysis harness for a clumsiness-aware Leggett-Garg test
//! on a five-qubit device whose CNOTs may only target `Q2`.
//!
//! The crate is layered bottom-up:
//!
//! - [`qsim`]: exact state-vector and density-matrix simulation of up to five
//!   qubits, generic over the real scalar type.
//! - [`compiler`]: the slot-grid circuit model, device validation, the two
//!   peephole behaviours of the vendor compiler (HH collapse, hoisting), the
//!   countermeasures against them and a small OpenQASM 2 subset.
//! - [`protocols`]: the six protocol circuits (a)–(f), outcome decoding and
//!   seeded multi-repetition execution.
//! - [`noise`]: depolarizing, readout, idle damping and the deliberate
//!   "clumsy" kick used to exercise the adroitness checks.
//! - [`analytics`]: correlators, adroitness bounds, the LG quantity and the
//!   violation verdict, plus the two result tables.
//! - [`oracle`]: closed forms, superoperator evaluation and dense brute-force
//!   evaluation that cross-check everything above.

pub mod analytics;
pub mod compiler;
mod error;
pub mod noise;
pub mod oracle;
pub mod protocols;
pub mod qsim;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision state vector.
pub type StateVector = qsim::StateVector<f64>;
/// Double-precision density matrix.
pub type DensityMatrix = qsim::DensityMatrix<f64>;
/// Double-precision observable.
pub type Observable = qsim::Observable<f64>;
/// Double-precision 2×2 gate matrix.
pub type Matrix2 = qsim::Matrix2<f64>;
/// Double-precision complex amplitude.
pub type Complex = num_complex::Complex<f64>;

/// The measurement angle used on hardware, `−3π/4`.
pub const DEVICE_THETA: f64 = -3.0 * std::f64::consts::FRAC_PI_4;
/// Shots per circuit execution used on hardware.
pub const DEFAULT_SHOTS: usize = 8192;
/// Repetitions of the complete six-protocol program.
pub const DEFAULT_REPETITIONS: usize = 10;
/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 5;
