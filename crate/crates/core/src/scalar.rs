//! Floating-point scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Real floating-point scalar the solver is generic over (`f32` or `f64`).
///
/// Tolerances quoted throughout the crate documentation assume `f64`;
/// `f32` instantiations work but only reach single-precision accuracy.
pub trait Real: Float + FloatConst + FftNum + Default + Display + Debug + Sum + 'static {
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable")
    }

    /// Converts an index or count into this scalar type.
    #[inline]
    fn of_usize(x: usize) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("count representable")
    }

    /// Converts an integer into this scalar type.
    #[inline]
    fn of_i64(x: i64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("integer representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = num_complex::Complex<T>;

/// Imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Cplx<T> {
    Cplx::new(T::zero(), T::one())
}

/// Sums a sequence in the given order (no reassociation), so reductions are
/// reproducible regardless of how the inputs were produced.
#[inline]
pub fn ordered_sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    let mut acc = T::zero();
    for x in it {
        acc = acc + x;
    }
    acc
}
