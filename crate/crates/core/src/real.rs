//! Scalar abstraction for the whole crate.
//!
//! Everything numeric is generic over [`Real`], which is any floating point
//! type nalgebra can do linear algebra with. `f64` is the intended default
//! (the acceptance tolerances assume it); `f32` works for quick scans.

use num_traits::FromPrimitive;

/// Floating point scalar usable throughout the crate.
pub trait Real: Copy + Send + Sync + 'static + nalgebra::RealField + FromPrimitive {
    /// `true` when the value is neither NaN nor infinite.
    fn finite(self) -> bool;

    /// Lossy view as `f64`, for diagnostics and report serialization.
    fn approx_f64(self) -> f64;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn finite(self) -> bool {
                <$t>::is_finite(self)
            }

            #[inline]
            fn approx_f64(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_real!(f32, f64);

/// Shorthand for converting an `f64` literal into the working scalar type.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal must be representable in the scalar type")
}
