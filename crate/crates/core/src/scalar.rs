//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All model code is written against [`Real`], which both `f32` and `f64`
//! implement. Special functions (log-gamma, digamma, Student-t quantiles) and
//! random variate generation are evaluated in `f64` and converted back, so
//! `f32` instantiations trade precision for memory but follow the same code
//! paths.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable by the linear algebra and inference engines.
pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Serialize
    + DeserializeOwned
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Widens to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    /// Machine epsilon of the concrete type.
    fn eps() -> Self;

    fn is_finite_value(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

/// Shorthand for [`Real::lit`].
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}
