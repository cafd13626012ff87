use num_complex::Complex;

use super::gates::{self, Matrix2};
use super::{check_qubit, check_register};
use crate::{Result, Scalar};

/// Hermitian operator on the full register, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable<T> {
    n_qubits: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> Observable<T> {
    /// Lifts a single-qubit operator onto qubit `q` of an `n_qubits` register.
    pub fn on_qubit(n_qubits: usize, q: usize, single: &Matrix2<T>) -> Result<Self> {
        check_register(n_qubits)?;
        check_qubit(q, n_qubits)?;
        let dim = 1 << n_qubits;
        let bit = 1 << q;
        let mut entries = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if (i & !bit) == (j & !bit) {
                    entries[i * dim + j] = single[(i >> q) & 1][(j >> q) & 1];
                }
            }
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn pauli_z() -> Self {
        Self::single(&gates::z())
    }

    pub fn pauli_y() -> Self {
        Self::single(&gates::y())
    }

    pub fn pauli_x() -> Self {
        Self::single(&gates::x())
    }

    /// `σ_θ = sin θ σ_y + cos θ σ_z` on one qubit.
    pub fn sigma_theta(theta: T) -> Self {
        Self::single(&gates::sigma_theta(theta))
    }

    fn single(m: &Matrix2<T>) -> Self {
        Self::on_qubit(1, 0, m).expect("one-qubit register")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[i * self.dim() + j]
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol))
    }

    /// `O² = I`, which for a Hermitian `O` pins its spectrum to `{−1, +1}`.
    pub fn squares_to_identity(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let sq = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                    acc + self.entry(i, k) * self.entry(k, j)
                });
                let id = if i == j { T::one() } else { T::zero() };
                (sq - Complex::new(id, T::zero())).norm() <= tol
            })
        })
    }
}
