//! 2×2 gate matrices and helpers.

use num_complex::Complex;

use crate::Scalar;

pub type Matrix2<T> = [[Complex<T>; 2]; 2];

fn c<T: Scalar>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

fn re<T: Scalar>(v: T) -> Complex<T> {
    Complex::new(v, T::zero())
}

pub fn identity<T: Scalar>() -> Matrix2<T> {
    [[re(T::one()), re(T::zero())], [re(T::zero()), re(T::one())]]
}

pub fn x<T: Scalar>() -> Matrix2<T> {
    [[re(T::zero()), re(T::one())], [re(T::one()), re(T::zero())]]
}

pub fn y<T: Scalar>() -> Matrix2<T> {
    let zero = T::zero();
    [
        [re(zero), c(zero, -T::one())],
        [c(zero, T::one()), re(zero)],
    ]
}

pub fn z<T: Scalar>() -> Matrix2<T> {
    [
        [re(T::one()), re(T::zero())],
        [re(T::zero()), re(-T::one())],
    ]
}

pub fn h<T: Scalar>() -> Matrix2<T> {
    let r = T::FRAC_1_SQRT_2();
    [[re(r), re(r)], [re(r), re(-r)]]
}

/// `diag(1, e^{iφ})`.
pub fn phase<T: Scalar>(phi: T) -> Matrix2<T> {
    [
        [re(T::one()), re(T::zero())],
        [re(T::zero()), Complex::from_polar(T::one(), phi)],
    ]
}

pub fn s<T: Scalar>() -> Matrix2<T> {
    phase(T::FRAC_PI_2())
}

pub fn sdg<T: Scalar>() -> Matrix2<T> {
    phase(-T::FRAC_PI_2())
}

pub fn t<T: Scalar>() -> Matrix2<T> {
    phase(T::FRAC_PI_4())
}

pub fn tdg<T: Scalar>() -> Matrix2<T> {
    phase(-T::FRAC_PI_4())
}

/// `exp(−i φ σ_x / 2)`.
pub fn rx<T: Scalar>(phi: T) -> Matrix2<T> {
    let half = phi / (T::one() + T::one());
    let (sn, cs) = half.sin_cos();
    [[re(cs), c(T::zero(), -sn)], [c(T::zero(), -sn), re(cs)]]
}

/// `exp(−i φ σ_z / 2)`.
pub fn rz<T: Scalar>(phi: T) -> Matrix2<T> {
    let half = phi / (T::one() + T::one());
    [
        [Complex::from_polar(T::one(), -half), re(T::zero())],
        [re(T::zero()), Complex::from_polar(T::one(), half)],
    ]
}

/// `sin θ σ_y + cos θ σ_z`.
pub fn sigma_theta<T: Scalar>(theta: T) -> Matrix2<T> {
    let (sn, cs) = theta.sin_cos();
    let yy = y::<T>();
    let zz = z::<T>();
    let mut out = [[re(T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = yy[i][j] * sn + zz[i][j] * cs;
        }
    }
    out
}

/// Exact basis rotation for the θ direction: maps the eigenstates of `σ_z`
/// onto those of `σ_θ`, `R σ_z R† = σ_θ`.
pub fn theta_rotation<T: Scalar>(theta: T) -> Matrix2<T> {
    rx(-theta)
}

pub fn mul<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    let mut out = [[re(T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Product of a sequence in *time order*: the first matrix acts first.
pub fn sequence<'a, T: Scalar>(gates: impl IntoIterator<Item = &'a Matrix2<T>>) -> Matrix2<T> {
    gates.into_iter().fold(identity(), |acc, g| mul(g, &acc))
}

pub fn dagger<T: Scalar>(a: &Matrix2<T>) -> Matrix2<T> {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

pub fn scale<T: Scalar>(a: &Matrix2<T>, k: Complex<T>) -> Matrix2<T> {
    [[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]]
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> T {
    let mut m = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Largest deviation of `U†U` from the identity.
pub fn unitarity_deviation<T: Scalar>(u: &Matrix2<T>) -> T {
    max_abs_diff(&mul(&dagger(u), u), &identity())
}

/// Distance between `a` and `b` after removing the best global phase.
pub fn phase_distance<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> T {
    let mut overlap = re(T::zero());
    for i in 0..2 {
        for j in 0..2 {
            overlap = overlap + a[i][j].conj() * b[i][j];
        }
    }
    let n = overlap.norm();
    if n == T::zero() {
        return max_abs_diff(a, b);
    }
    max_abs_diff(&scale(a, overlap / re(n)), b)
}
