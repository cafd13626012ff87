use num_complex::Complex;

use super::gates::{unitarity_deviation, Matrix2};
use super::sampling::{sample_distribution, Counts};
use super::{check_qubit, check_register};
use crate::{Error, Result, Scalar};

/// Pure state of `n_qubits ≤ 5` qubits, little-endian amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1 << n_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: index,
            });
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                got: amplitudes.len(),
            });
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > T::tolerance() {
            return Err(Error::NotNormalised(norm.to_f64_lossy()));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn apply_1q(&mut self, gate: &Matrix2<T>, q: usize) -> Result<()> {
        let deviation = unitarity_deviation(gate);
        if deviation > T::tolerance() {
            return Err(Error::NonUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
        check_qubit(q, self.n_qubits)?;
        let bit = 1 << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = gate[0][0] * a0 + gate[0][1] * a1;
                self.amplitudes[i | bit] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_qubit(control, self.n_qubits)?;
        check_qubit(target, self.n_qubits)?;
        if control == target {
            return Err(Error::SameControlTarget(control));
        }
        let (cbit, tbit) = (1 << control, 1 << target);
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// Born-rule probabilities in f64, indexed like the amplitudes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr().to_f64_lossy())
            .collect()
    }

    /// `|⟨self|other⟩|`, the phase-insensitive overlap.
    pub fn overlap(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
            .norm()
    }

    /// Multinomial sample of `shots` terminal measurements of every qubit.
    pub fn sample_shots(&self, shots: usize, seed: u64) -> Result<Counts> {
        let measured: Vec<usize> = (0..self.n_qubits).collect();
        sample_distribution(&self.probabilities(), self.n_qubits, &measured, shots, seed)
    }
}
