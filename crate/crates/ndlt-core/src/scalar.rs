//! Floating-point abstraction so pipelines can run in f32 or f64.

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use rustfft::FftNum;
use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

/// Scalar type for spectral and grid data.
///
/// Tables (quadrature weights, Legendre and Wigner-d values, filter
/// profiles) are always computed in f64 and demoted through [`Real::of`],
/// so a single-precision pipeline stores and accumulates in 32 bits while
/// sharing all code with the double-precision path.
pub trait Real:
    Float
    + FloatConst
    + FftNum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Sum
    + Debug
{
    fn of(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Complex value over the crate scalar.
pub type C<T> = Complex<T>;

/// Demote a complex double to the target precision.
#[inline]
pub fn demote<T: Real>(z: Complex<f64>) -> C<T> {
    Complex::new(T::of(z.re), T::of(z.im))
}

/// Promote a complex value to double precision.
#[inline]
pub fn promote<T: Real>(z: C<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}
