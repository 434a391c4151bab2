use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical path is generic over.
///
/// Implemented for `f32` and `f64`. Exact arithmetic lives in [`crate::oracle`]
/// and deliberately does not go through this trait.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Base of the default comparison tolerance, before scaling by the
    /// magnitude of the instance.
    fn tol_base() -> Self;

    /// Lossy conversion from `f64`; used for constants and generated data.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tol_base() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn tol_base() -> Self {
        1e-4
    }
}
