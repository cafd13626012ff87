use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};

use super::gates::{self, unitarity_deviation, Matrix2};
use super::{check_qubit, check_register, Observable, StateVector};
use crate::{Error, Result, Scalar};

/// Mixed state of `n_qubits ≤ 5` qubits, row-major `2^n × 2^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// `|0…0⟩⟨0…0|`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Ok(Self::from_state(&StateVector::new(n_qubits)?))
    }

    pub fn from_state(state: &StateVector<T>) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in amps {
            for b in amps {
                entries.push(a * b.conj());
            }
        }
        Self {
            n_qubits: state.n_qubits(),
            entries,
        }
    }

    /// Builds from raw row-major entries; checks shape, Hermiticity, unit
    /// trace and positivity.
    pub fn from_entries(n_qubits: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1 << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let dm = Self { n_qubits, entries };
        if !dm.is_valid(T::tolerance()) {
            return Err(Error::NotNormalised(dm.trace().to_f64_lossy()));
        }
        Ok(dm)
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

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.entry(i, i).re)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i..d).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol))
    }

    /// Smallest eigenvalue, computed in f64.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::<Complex64>::from_fn(d, d, |i, j| {
            let e = self.entry(i, j);
            Complex64::new(e.re.to_f64_lossy(), e.im.to_f64_lossy())
        });
        // symmetrise so round-off cannot break the Hermitian solver
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermitian within `tol`, trace one within `tol`, spectrum ≥ −1e-10.
    pub fn is_valid(&self, tol: T) -> bool {
        self.is_hermitian(tol)
            && (self.trace() - T::one()).abs() <= tol
            && self.min_eigenvalue() >= -1e-10
    }

    /// Diagonal of the matrix as f64 probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.entry(i, i).re.to_f64_lossy())
            .collect()
    }

    /// `ρ ↦ U ρ U†` on qubit `q`.
    pub fn apply_1q(&mut self, gate: &Matrix2<T>, q: usize) -> Result<()> {
        let deviation = unitarity_deviation(gate);
        if deviation > T::tolerance() {
            return Err(Error::NonUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
        check_qubit(q, self.n_qubits)?;
        self.conjugate(gate, q);
        Ok(())
    }

    /// `K ρ K†` for an arbitrary 2×2 `K` on qubit `q`.
    fn conjugate(&mut self, k: &Matrix2<T>, q: usize) {
        let d = self.dim();
        let bit = 1 << q;
        // rows: K acting on the left
        for col in 0..d {
            for i in 0..d {
                if i & bit == 0 {
                    let a0 = self.entries[i * d + col];
                    let a1 = self.entries[(i | bit) * d + col];
                    self.entries[i * d + col] = k[0][0] * a0 + k[0][1] * a1;
                    self.entries[(i | bit) * d + col] = k[1][0] * a0 + k[1][1] * a1;
                }
            }
        }
        // columns: K† acting on the right, i.e. conj(K) on each row vector
        for row in 0..d {
            let base = row * d;
            for j in 0..d {
                if j & bit == 0 {
                    let a0 = self.entries[base + j];
                    let a1 = self.entries[base + (j | bit)];
                    self.entries[base + j] = k[0][0].conj() * a0 + k[0][1].conj() * a1;
                    self.entries[base + (j | bit)] = k[1][0].conj() * a0 + k[1][1].conj() * a1;
                }
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check_qubit(control, self.n_qubits)?;
        check_qubit(target, self.n_qubits)?;
        if control == target {
            return Err(Error::SameControlTarget(control));
        }
        let d = self.dim();
        let (cbit, tbit) = (1 << control, 1 << target);
        let perm = |i: usize| if i & cbit != 0 { i ^ tbit } else { i };
        let old = self.entries.clone();
        for i in 0..d {
            for j in 0..d {
                self.entries[i * d + j] = old[perm(i) * d + perm(j)];
            }
        }
        Ok(())
    }

    /// Applies the channel `ρ ↦ Σ_k K_k ρ K_k†` on qubit `q`.
    ///
    /// The Kraus set must satisfy `Σ K†K = I` within the scalar tolerance.
    pub fn apply_kraus_1q(&mut self, kraus: &[Matrix2<T>], q: usize) -> Result<()> {
        check_qubit(q, self.n_qubits)?;
        let deviation = completeness_deviation(kraus);
        if deviation > T::tolerance() {
            return Err(Error::NonUnitary {
                deviation: deviation.to_f64_lossy(),
            });
        }
        let original = self.clone();
        let mut acc = vec![Complex::new(T::zero(), T::zero()); self.entries.len()];
        for k in kraus {
            let mut term = original.clone();
            term.conjugate(k, q);
            for (a, t) in acc.iter_mut().zip(&term.entries) {
                *a = *a + t;
            }
        }
        self.entries = acc;
        Ok(())
    }

    /// Mixture `Σ_k w_k (P_k ⊗ Q_k) ρ (P_k ⊗ Q_k)†` over unitary pairs acting
    /// on qubits `a` and `b`; the weights must sum to one.
    pub fn apply_unitary_mixture_2q(
        &mut self,
        terms: &[(T, Matrix2<T>, Matrix2<T>)],
        a: usize,
        b: usize,
    ) -> Result<()> {
        check_qubit(a, self.n_qubits)?;
        check_qubit(b, self.n_qubits)?;
        if a == b {
            return Err(Error::SameControlTarget(a));
        }
        let weight = terms.iter().fold(T::zero(), |acc, t| acc + t.0);
        if (weight - T::one()).abs() > T::tolerance() {
            return Err(Error::NonUnitary {
                deviation: (weight - T::one()).to_f64_lossy(),
            });
        }
        let original = self.clone();
        let mut acc = vec![Complex::new(T::zero(), T::zero()); self.entries.len()];
        for (w, pa, pb) in terms {
            if *w == T::zero() {
                continue;
            }
            let mut term = original.clone();
            term.apply_1q(pa, a)?;
            term.apply_1q(pb, b)?;
            for (x, t) in acc.iter_mut().zip(&term.entries) {
                *x = *x + t * *w;
            }
        }
        self.entries = acc;
        Ok(())
    }

    /// Measurement-dephasing superoperator `ρ ↦ ½(ρ + σ ρ σ)` on qubit `q`
    /// with `σ = sin θ σ_y + cos θ σ_z`; `θ = 0` is the z basis.
    pub fn dephase(&mut self, q: usize, basis_angle: T) -> Result<()> {
        self.apply_kraus_1q(&dephasing_kraus(basis_angle), q)
    }

    /// `Tr(O ρ)`; the imaginary residue must be below `1e-10`.
    pub fn expect(&self, obs: &Observable<T>) -> Result<T> {
        if obs.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: obs.dim(),
            });
        }
        let d = self.dim();
        let mut tr = Complex::new(T::zero(), T::zero());
        for i in 0..d {
            for k in 0..d {
                tr = tr + obs.entry(i, k) * self.entry(k, i);
            }
        }
        debug_assert!(tr.im.abs().to_f64_lossy() < 1e-10 * (1.0 + tr.re.abs().to_f64_lossy()));
        Ok(tr.re)
    }

    /// Reduced state of a single qubit.
    pub fn reduced(&self, q: usize) -> Result<DensityMatrix<T>> {
        check_qubit(q, self.n_qubits)?;
        let d = self.dim();
        let bit = 1 << q;
        let mut out = vec![Complex::new(T::zero(), T::zero()); 4];
        for i in 0..d {
            for j in 0..d {
                if (i & !bit) == (j & !bit) {
                    let (a, b) = ((i >> q) & 1, (j >> q) & 1);
                    out[a * 2 + b] = out[a * 2 + b] + self.entry(i, j);
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: 1,
            entries: out,
        })
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }
}

/// The dephasing superoperator `X ↦ ½(X + σ_θ X σ_θ)` on an arbitrary 2×2
/// operator (not necessarily a state).
pub fn dephase_operator<T: Scalar>(op: &Matrix2<T>, theta: T) -> Matrix2<T> {
    let sigma = gates::sigma_theta(theta);
    let conj = gates::mul(&gates::mul(&sigma, op), &sigma);
    let half = Complex::new(T::one() / (T::one() + T::one()), T::zero());
    let mut out = *op;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (op[i][j] + conj[i][j]) * half;
        }
    }
    out
}

/// Kraus pair `{I/√2, σ_θ/√2}` of the dephasing superoperator.
pub(crate) fn dephasing_kraus<T: Scalar>(theta: T) -> [Matrix2<T>; 2] {
    let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    [
        gates::scale(&gates::identity(), r),
        gates::scale(&gates::sigma_theta(theta), r),
    ]
}

/// Largest deviation of `Σ K†K` from the identity.
pub fn completeness_deviation<T: Scalar>(kraus: &[Matrix2<T>]) -> T {
    let zero = Complex::new(T::zero(), T::zero());
    let sum = kraus.iter().fold([[zero; 2]; 2], |acc, k| {
        let kk = gates::mul(&gates::dagger(k), k);
        [
            [acc[0][0] + kk[0][0], acc[0][1] + kk[0][1]],
            [acc[1][0] + kk[1][0], acc[1][1] + kk[1][1]],
        ]
    });
    gates::max_abs_diff(&sum, &gates::identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn dm1(entries: [[f64; 2]; 2]) -> DensityMatrix<f64> {
        DensityMatrix::from_entries(
            1,
            entries
                .iter()
                .flatten()
                .map(|&v| Complex::new(v, 0.0))
                .collect(),
        )
        .unwrap()
    }

    fn theta_one(theta: f64) -> DensityMatrix<f64> {
        let mut s = StateVector::basis(1, 1).unwrap();
        s.apply_1q(&gates::theta_rotation(theta), 0).unwrap();
        DensityMatrix::from_state(&s)
    }

    #[test]
    fn z_dephasing_fixes_diagonal_states() {
        let mut rho = dm1([[0.3, 0.0], [0.0, 0.7]]);
        let before = rho.clone();
        rho.dephase(0, 0.0).unwrap();
        assert!(rho.max_abs_diff(&before) < 1e-12);
    }

    #[test]
    fn z_dephasing_kills_plus_coherence() {
        let mut rho = dm1([[0.5, 0.5], [0.5, 0.5]]);
        rho.dephase(0, 0.0).unwrap();
        assert!(rho.max_abs_diff(&dm1([[0.5, 0.0], [0.0, 0.5]])) < 1e-12);
    }

    #[test]
    fn theta_dephasing_fixes_theta_eigenstate() {
        for theta in [-3.0 * PI / 4.0, 0.3, 1.9] {
            let mut rho = theta_one(theta);
            let before = rho.clone();
            rho.dephase(0, theta).unwrap();
            assert!(rho.max_abs_diff(&before) < 1e-12);
        }
    }

    #[test]
    fn dephasing_is_idempotent_and_complete() {
        let mut s = StateVector::<f64>::new(2).unwrap();
        s.apply_1q(&gates::rx(0.9), 0).unwrap();
        s.apply_1q(&gates::h(), 1).unwrap();
        s.apply_cnot(1, 0).unwrap();
        let mut once = DensityMatrix::from_state(&s);
        once.dephase(0, 0.8).unwrap();
        let mut twice = once.clone();
        twice.dephase(0, 0.8).unwrap();
        assert!(once.max_abs_diff(&twice) < 1e-12);
        assert!((once.trace() - 1.0).abs() < 1e-12);
        assert!(once.is_valid(1e-12));
        assert!(completeness_deviation(&dephasing_kraus(0.8f64)) < 1e-12);
    }

    #[test]
    fn operator_dephasing_matches_kraus_path() {
        let mut rho = theta_one(0.37);
        let raw = [
            [rho.entry(0, 0), rho.entry(0, 1)],
            [rho.entry(1, 0), rho.entry(1, 1)],
        ];
        rho.dephase(0, 1.2).unwrap();
        let direct = dephase_operator(&raw, 1.2);
        for (i, row) in direct.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert!((x - rho.entry(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn expectation_sign_conventions() {
        let one = dm1([[0.0, 0.0], [0.0, 1.0]]);
        assert!((one.expect(&Observable::pauli_z()).unwrap() + 1.0).abs() < 1e-12);
        let theta = -3.0 * PI / 4.0;
        let rho = theta_one(theta);
        assert!((rho.expect(&Observable::sigma_theta(theta)).unwrap() + 1.0).abs() < 1e-12);
        // Bloch vector of the −1 eigenstate is −(0, sin θ, cos θ): ⟨σ_z⟩ = −cos θ = 1/√2
        assert!((rho.expect(&Observable::pauli_z()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn expect_rejects_dimension_mismatch() {
        let rho = DensityMatrix::<f64>::new(2).unwrap();
        assert!(matches!(
            rho.expect(&Observable::pauli_z()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bell_state_target_is_maximally_mixed() {
        let mut s = StateVector::<f64>::new(2).unwrap();
        s.apply_1q(&gates::h(), 0).unwrap();
        s.apply_cnot(0, 1).unwrap();
        let rho = DensityMatrix::from_state(&s);
        let reduced = rho.reduced(1).unwrap();
        assert!(reduced.max_abs_diff(&dm1([[0.5, 0.0], [0.0, 0.5]])) < 1e-12);
    }

    #[test]
    fn cnot_matches_state_vector_path() {
        let mut s = StateVector::<f64>::new(3).unwrap();
        s.apply_1q(&gates::rx(0.4), 0).unwrap();
        s.apply_1q(&gates::h(), 2).unwrap();
        let mut rho = DensityMatrix::from_state(&s);
        s.apply_cnot(2, 0).unwrap();
        rho.apply_cnot(2, 0).unwrap();
        s.apply_1q(&gates::t(), 0).unwrap();
        rho.apply_1q(&gates::t(), 0).unwrap();
        assert!(rho.max_abs_diff(&DensityMatrix::from_state(&s)) < 1e-12);
    }

    #[test]
    fn invalid_matrices_rejected() {
        let bad = vec![
            Complex::new(0.6, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.6, 0.0),
        ];
        assert!(DensityMatrix::<f64>::from_entries(1, bad).is_err());
        let neg = vec![
            Complex::new(1.2, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(-0.2, 0.0),
        ];
        assert!(DensityMatrix::<f64>::from_entries(1, neg).is_err());
    }

    #[test]
    fn kraus_rejects_incomplete_sets() {
        let mut rho = DensityMatrix::<f64>::new(1).unwrap();
        assert!(rho
            .apply_kraus_1q(&[gates::identity(), gates::x()], 0)
            .is_err());
    }
}
