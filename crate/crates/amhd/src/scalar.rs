//! Scalar abstraction for the whole crate.
//!
//! Every module is generic over a floating-point scalar so the same field
//! algebra runs in f32 or f64. Residual tolerances quoted in the docs assume
//! f64; f32 works but with correspondingly looser error floors.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display, LowerExp};
use std::ops::AddAssign;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FromPrimitive + AddAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Lossy conversion for diagnostics and error messages.
    fn to_f64_lossy(self) -> f64 {
        num_traits::cast(self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an f64 literal into `T`, panicking only for literals no float type can hold.
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in every Real type")
}

/// Positive floor used when normalizing by quantities that may vanish.
///
/// Nominally 1e-300; scaled up to the smallest positive normal value for
/// narrower types where 1e-300 underflows to zero.
pub fn tiny_floor<T: Real>() -> T {
    let nominal = T::from_f64(1e-300).unwrap_or_else(T::zero);
    if nominal > T::zero() {
        nominal
    } else {
        T::min_positive_value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_convert_exactly() {
        assert_eq!(lit::<f64>(0.5), 0.5);
        assert_eq!(lit::<f32>(0.5), 0.5f32);
    }

    #[test]
    fn tiny_floor_is_positive_in_both_widths() {
        assert!(tiny_floor::<f64>() > 0.0);
        assert!(tiny_floor::<f32>() > 0.0);
        assert_eq!(tiny_floor::<f64>(), 1e-300);
    }
}
