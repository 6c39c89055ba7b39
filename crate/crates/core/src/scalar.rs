//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All kernels are written against [`Real`], which is implemented for `f32`
//! and `f64`. Tolerances are expressed once, as their double-precision
//! values, and scaled to the working precision by [`tol`].

use nalgebra::{Complex, RealField};

/// Real scalar type the kernels are generic over.
pub trait Real: RealField + Copy + Send + Sync + 'static {
    /// Lossy conversion used for reporting and formatting.
    fn to_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

/// Converts a double-precision literal to `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Scales a double-precision tolerance to the machine epsilon of `T`.
///
/// `tol::<f64>(x) == x`; for `f32` the value grows by the epsilon ratio.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let ratio = T::default_epsilon().to_f64() / f64::EPSILON;
    lit(x * ratio.max(1.0))
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}
