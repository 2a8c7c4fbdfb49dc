//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar (`f32` or `f64`) underlying all complex linear algebra.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + LowerExp + Display + Debug + Send + Sync + 'static
{
    /// Tolerance for structural predicates (Hermiticity, unitarity, normalization).
    ///
    /// `1e-10` in double precision; scaled from machine epsilon otherwise.
    fn structural_tol() -> Self {
        lit::<Self>(1e-10).max(Self::default_epsilon() * lit(1e3))
    }

    /// Tolerance for reconstruction checks.
    fn reconstruction_tol() -> Self {
        lit::<Self>(1e-9).max(Self::default_epsilon() * lit(1e4))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Lossy conversion back to `f64`, used by reports and IO.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

#[inline]
pub fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

#[inline]
pub fn modulus_sq<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}
