//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written against [`Real`], which is implemented for
//! `f32` and `f64`. Complex quantities are `num_complex::Complex<T>`.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync + std::fmt::Debug + 'static
{
    /// Relative condition number above which a symbol is treated as singular.
    const SINGULAR_COND: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const SINGULAR_COND: f64 = 1e10;
}

impl Real for f32 {
    // f32 carries ~7 digits; keep the same margin below the reliability limit.
    const SINGULAR_COND: f64 = 1e5;
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// `e^{i theta}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// `i * x` for a real `x`.
#[inline]
pub fn imag<T: Real>(x: T) -> C<T> {
    Complex::new(T::zero(), x)
}

#[inline]
pub fn from_int<T: Real>(k: i64) -> T {
    T::from_i64(k).expect("mode index representable")
}

/// Euclidean norm of a complex vector.
pub fn vnorm<T: Real>(v: &CVector<T>) -> T {
    v.iter()
        .fold(T::zero(), |acc, z| acc + z.re * z.re + z.im * z.im)
        .sqrt()
}

/// Singular values of `m`, sorted descending. Empty matrices yield an empty vector.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Operator 2-norm (largest singular value).
pub fn opnorm<T: Real>(m: &CMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}
