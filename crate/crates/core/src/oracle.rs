//! Independent ground truth.
//!
//! Three routes compute the same correlators: the closed form, the
//! measurement superoperators applied to a single-qubit operator, and a
//! dense brute-force evaluation of the built five-qubit circuits. The dense
//! route lifts every gate to a full `2^n × 2^n` matrix with Kronecker
//! products and multiplies; it shares only the 2×2 gate matrices with the
//! sampler's index-twiddling simulator.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{verdict, Verdict};
use crate::noise::{apply_noise, Channel, NoiseModel, NoisyProgram};
use crate::protocols::{build_protocol, Basis, GatesetMode, ProtocolCircuit, ProtocolId, Role};
use crate::qsim::{dephase_operator, gates, Matrix2};
use crate::{Error, Result, Scalar, MAX_QUBITS};

/// `LG(θ) = 2 cos θ + cos⁴ θ + 1`.
pub fn closed_form_lg<T: Scalar>(theta: T) -> T {
    let c = theta.cos();
    let two = T::one() + T::one();
    two * c + c.powi(4) + T::one()
}

/// Closed-form correlators `(cos θ, cos θ, cos⁴ θ)`.
pub fn closed_form_correlators<T: Scalar>(theta: T) -> (T, T, T) {
    let c = theta.cos();
    (c, c, c.powi(4))
}

fn half_trace<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> T {
    let p = gates::mul(a, b);
    (p[0][0] + p[1][1]).re / (T::one() + T::one())
}

fn anticommutator<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    let ab = gates::mul(a, b);
    let ba = gates::mul(b, a);
    let mut out = ab;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ab[i][j] + ba[i][j];
        }
    }
    out
}

/// `ρ_θ = |1⟩_θ⟨1|_θ`, the state prepared by the initialisation.
pub fn theta_state<T: Scalar>(theta: T) -> Matrix2<T> {
    let r = gates::theta_rotation(theta);
    let v = [r[0][1], r[1][1]];
    [
        [v[0] * v[0].conj(), v[0] * v[1].conj()],
        [v[1] * v[0].conj(), v[1] * v[1].conj()],
    ]
}

/// Correlators from the measurement superoperators:
///
/// - `⟨O1O3⟩_a = ⟨O1O2⟩_f = ½ Tr(σ_z {σ_θ, ρ})`
/// - `⟨O2O3⟩_f = ½ Tr(σ_z (Δ̄_θ ∘ Δ̄ ∘ Δ̄_θ)({σ_z, Δ̄_θ(ρ)}))`
///
/// with `ρ = ρ_θ`. Products of two outcomes carry no sign ambiguity, so
/// these Pauli-convention values equal the operational ones.
pub fn superoperator_correlators<T: Scalar>(theta: T) -> (T, T, T) {
    let rho = theta_state(theta);
    let sz = gates::z::<T>();
    let st = gates::sigma_theta(theta);
    let c_a = half_trace(&sz, &anticommutator(&st, &rho));
    let c_12 = c_a;
    let inner = anticommutator(&sz, &dephase_operator(&rho, theta));
    let evolved = dephase_operator(
        &dephase_operator(&dephase_operator(&inner, theta), T::zero()),
        theta,
    );
    let c_23 = half_trace(&sz, &evolved);
    (c_a, c_12, c_23)
}

/// Operational `⟨O3⟩` after unrecorded measurements in the given bases.
pub fn superoperator_o3<T: Scalar>(theta: T, bases: &[Basis]) -> T {
    let mut rho = theta_state(theta);
    for b in bases {
        let angle = match b {
            Basis::Z => T::zero(),
            Basis::Theta => theta,
        };
        rho = dephase_operator(&rho, angle);
    }
    let two = T::one() + T::one();
    -two * half_trace(&gates::z(), &rho)
}

/// Root of `LG(θ)` in `(π/2, π)`: bisection on `c = cos θ` over
/// `[−2^{−1/3}, 0]`, where `2c + c⁴ + 1` is increasing, then `arccos`.
pub fn violation_boundary() -> f64 {
    let f = |c: f64| 2.0 * c + c.powi(4) + 1.0;
    let (mut lo, mut hi) = (-(0.5f64).cbrt(), 0.0);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).acos()
}

type Dense = Vec<Complex64>;

fn dense_identity(dim: usize) -> Dense {
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn kron(a: &Dense, da: usize, b: &Dense, db: usize) -> Dense {
    let d = da * db;
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..da {
        for j in 0..da {
            let aij = a[i * da + j];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + (j * db + l)] = aij * b[k * db + l];
                }
            }
        }
    }
    out
}

/// `I ⊗ … ⊗ m ⊗ … ⊗ I` with `m` at qubit `q` (qubit 0 rightmost).
fn lift(m: &Matrix2<f64>, q: usize, n: usize) -> Dense {
    let mut full = vec![Complex64::new(1.0, 0.0)];
    let mut dim = 1;
    for k in (0..n).rev() {
        let factor: Dense = if k == q {
            vec![m[0][0], m[0][1], m[1][0], m[1][1]]
        } else {
            dense_identity(2)
        };
        full = kron(&full, dim, &factor, 2);
        dim *= 2;
    }
    full
}

fn matmul(a: &Dense, b: &Dense, d: usize) -> Dense {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

fn adjoint(a: &Dense, d: usize) -> Dense {
    let mut out = a.clone();
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = a[j * d + i].conj();
        }
    }
    out
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ X` on the chosen qubits.
fn dense_cnot(control: usize, target: usize, n: usize) -> Dense {
    let zero = Complex::new(0.0, 0.0);
    let one = Complex::new(1.0, 0.0);
    let p0 = [[one, zero], [zero, zero]];
    let p1 = [[zero, zero], [zero, one]];
    let d = 1 << n;
    let keep = lift(&p0, control, n);
    let flip = matmul(&lift(&p1, control, n), &lift(&gates::x(), target, n), d);
    keep.iter().zip(&flip).map(|(a, b)| a + b).collect()
}

/// Kraus operators of a channel, lifted to the full register.
fn dense_kraus(channel: &Channel, n: usize) -> Vec<(f64, Dense)> {
    let d = 1 << n;
    match channel {
        Channel::Unitary { qubit, matrix } => vec![(1.0, lift(matrix, *qubit, n))],
        Channel::Cnot { control, target } => vec![(1.0, dense_cnot(*control, *target, n))],
        Channel::Kraus { qubit, operators } => operators
            .iter()
            .map(|k| (1.0, lift(k, *qubit, n)))
            .collect(),
        Channel::PauliMixture2 { a, b, terms } => terms
            .iter()
            .map(|(w, pa, pb)| (*w, matmul(&lift(pa, *a, n), &lift(pb, *b, n), d)))
            .collect(),
    }
}

/// Outcome distribution of a noisy program by dense linear algebra and
/// explicit enumeration of readout-flip patterns.
pub fn dense_distribution(program: &NoisyProgram) -> Result<Vec<f64>> {
    let n = program.n_qubits;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::RegisterSize(n));
    }
    let d = 1 << n;
    let raw: Vec<f64> = if program.is_unitary() {
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[0] = Complex64::new(1.0, 0.0);
        for op in &program.ops {
            let (_, u) = &dense_kraus(&op.channel, n)[0];
            v = (0..d)
                .map(|i| (0..d).map(|j| u[i * d + j] * v[j]).sum())
                .collect();
        }
        v.iter().map(|a| a.norm_sqr()).collect()
    } else {
        let mut rho = vec![Complex64::new(0.0, 0.0); d * d];
        rho[0] = Complex64::new(1.0, 0.0);
        for op in &program.ops {
            let mut next = vec![Complex64::new(0.0, 0.0); d * d];
            for (w, k) in dense_kraus(&op.channel, n) {
                let term = matmul(&matmul(&k, &rho, d), &adjoint(&k, d), d);
                for (x, t) in next.iter_mut().zip(&term) {
                    *x += t * w;
                }
            }
            rho = next;
        }
        (0..d).map(|i| rho[i * d + i].re).collect()
    };

    let measured = &program.measured;
    let mask: usize = measured.iter().map(|q| 1 << q).sum();
    let mut marginal = vec![0.0; d];
    for (i, p) in raw.iter().enumerate() {
        marginal[i & mask] += p;
    }
    let eps = program.readout_flip;
    let m = measured.len();
    let mut out = vec![0.0; d];
    for (outcome, slot) in out.iter_mut().enumerate() {
        if outcome & !mask != 0 {
            continue;
        }
        for pattern in 0..(1usize << m) {
            let flips: usize = (0..m)
                .filter(|b| pattern >> b & 1 == 1)
                .map(|b| 1 << measured[b])
                .sum();
            let k = pattern.count_ones() as i32;
            *slot += marginal[outcome ^ flips] * eps.powi(k) * (1.0 - eps).powi(m as i32 - k);
        }
    }
    Ok(out)
}

/// Exact joint outcome distribution of one protocol with its role map.
#[derive(Debug, Clone)]
pub struct ExactEvaluation {
    pub probabilities: Vec<f64>,
    pub roles: BTreeMap<Role, usize>,
}

impl ExactEvaluation {
    fn value(&self, outcome: usize, role: Role) -> Result<f64> {
        if role == Role::O1 {
            return Ok(1.0);
        }
        let q = self
            .roles
            .get(&role)
            .ok_or_else(|| Error::MissingRole(role.to_string()))?;
        Ok(if outcome >> q & 1 == 1 { 1.0 } else { -1.0 })
    }

    /// `Σ_outcomes p · a · b`.
    pub fn correlator(&self, a: Role, b: Role) -> Result<f64> {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(p * self.value(i, a)? * self.value(i, b)?))
            .sum()
    }

    /// Probability that qubit `q` reads 1.
    pub fn marginal_one(&self, q: usize) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(i, _)| i >> q & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Exact evaluation of a built protocol under `model`.
pub fn brute_force_correlators(
    pc: &ProtocolCircuit,
    model: &NoiseModel,
) -> Result<ExactEvaluation> {
    if pc.circuit.n_qubits() > MAX_QUBITS {
        return Err(Error::RegisterSize(pc.circuit.n_qubits()));
    }
    let program = apply_noise(&pc.circuit, &pc.sites, &model.restricted_to(pc))?;
    Ok(ExactEvaluation {
        probabilities: dense_distribution(&program)?,
        roles: pc.roles.clone(),
    })
}

/// Exact (shot-free) values of the whole six-protocol program.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactProgram {
    pub c_a: f64,
    pub c_12: f64,
    pub c_23: f64,
    /// `⟨O1O3⟩` of protocols b, c, d, e.
    pub adroit: [f64; 4],
    pub eps: [f64; 4],
    pub eps_total: f64,
    pub lg: f64,
    /// `⟨O1O3⟩_f`.
    pub c_13_f: f64,
    pub verdict: Verdict,
}

pub fn exact_program(theta: f64, mode: GatesetMode, model: &NoiseModel) -> Result<ExactProgram> {
    let eval = |id| brute_force_correlators(&build_protocol(id, theta, mode)?, model);
    let a = eval(ProtocolId::A)?;
    let f = eval(ProtocolId::F)?;
    let c_a = a.correlator(Role::O1, Role::O3)?;
    let mut adroit = [0.0; 4];
    for (slot, id) in
        adroit
            .iter_mut()
            .zip([ProtocolId::B, ProtocolId::C, ProtocolId::D, ProtocolId::E])
    {
        *slot = eval(id)?.correlator(Role::O1, Role::O3)?;
    }
    let eps = adroit.map(|x| (x - c_a).abs());
    let eps_total = eps.iter().sum();
    let c_12 = f.correlator(Role::O1, Role::O2)?;
    let c_23 = f.correlator(Role::O2, Role::O3)?;
    let lg = c_a + c_12 + c_23 + 1.0;
    Ok(ExactProgram {
        c_a,
        c_12,
        c_23,
        adroit,
        eps,
        eps_total,
        lg,
        c_13_f: f.correlator(Role::O1, Role::O3)?,
        verdict: verdict(lg, eps_total),
    })
}

/// `(c_a, c_12, c_23, lg)` from one evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathValues {
    pub c_a: f64,
    pub c_12: f64,
    pub c_23: f64,
    pub lg: f64,
}

impl PathValues {
    fn from_correlators((c_a, c_12, c_23): (f64, f64, f64)) -> Self {
        Self {
            c_a,
            c_12,
            c_23,
            lg: c_a + c_12 + c_23 + 1.0,
        }
    }

    pub fn max_abs_diff(&self, other: &PathValues) -> f64 {
        [
            self.c_a - other.c_a,
            self.c_12 - other.c_12,
            self.c_23 - other.c_23,
            self.lg - other.lg,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub closed_form: PathValues,
    pub superoperator: PathValues,
    pub brute_force: PathValues,
}

impl SweepRow {
    pub fn max_disagreement(&self) -> f64 {
        self.closed_form
            .max_abs_diff(&self.superoperator)
            .max(self.closed_form.max_abs_diff(&self.brute_force))
            .max(self.superoperator.max_abs_diff(&self.brute_force))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSweep {
    pub rows: Vec<SweepRow>,
}

/// Evaluates all three routes at each θ (ideal gateset, no noise).
pub fn theta_sweep(thetas: &[f64]) -> Result<ThetaSweep> {
    let rows = thetas
        .par_iter()
        .map(|&theta| {
            let mut closed = PathValues::from_correlators(closed_form_correlators(theta));
            closed.lg = closed_form_lg(theta);
            let superop = PathValues::from_correlators(superoperator_correlators(theta));
            let ideal = NoiseModel::ideal();
            let a = brute_force_correlators(
                &build_protocol(ProtocolId::A, theta, GatesetMode::Ideal)?,
                &ideal,
            )?;
            let f = brute_force_correlators(
                &build_protocol(ProtocolId::F, theta, GatesetMode::Ideal)?,
                &ideal,
            )?;
            let brute = PathValues::from_correlators((
                a.correlator(Role::O1, Role::O3)?,
                f.correlator(Role::O1, Role::O2)?,
                f.correlator(Role::O2, Role::O3)?,
            ));
            Ok(SweepRow {
                theta,
                closed_form: closed,
                superoperator: superop,
                brute_force: brute,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ThetaSweep { rows })
}

impl ThetaSweep {
    /// `n` angles evenly spaced over `[−π, π]`, both ends included.
    pub fn uniform_angles(n: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        match n {
            0 => vec![],
            1 => vec![0.0],
            _ => (0..n)
                .map(|i| -PI + 2.0 * PI * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,path,c_a,c_12,c_23,lg\n");
        for r in &self.rows {
            for (name, v) in [
                ("closed_form", r.closed_form),
                ("superoperator", r.superoperator),
                ("brute_force", r.brute_force),
            ] {
                let _ = writeln!(
                    out,
                    "{:?},{name},{:?},{:?},{:?},{:?}",
                    r.theta, v.c_a, v.c_12, v.c_23, v.lg
                );
            }
        }
        out
    }
}
