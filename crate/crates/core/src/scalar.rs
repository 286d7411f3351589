//! Scalar abstraction for the numeric core.
//!
//! All matrix and recurrence arithmetic is generic over a real floating-point
//! type; complex entries are `num_complex::Complex<T>`. Concrete `f64` aliases
//! live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real scalar type underlying all computations: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Debug + Display + 'static {}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics if the value is not representable, which cannot happen for the
/// finite literals used in this crate.
pub fn lit<T: Scalar>(value: f64) -> T {
    T::from_f64(value).expect("literal must be representable in the scalar type")
}

/// Default absolute tolerance for hermiticity, positivity, and unitarity
/// checks: 1e-10, widened to 256 machine epsilons for low-precision scalars
/// where 1e-10 is below the noise floor.
pub fn check_tol<T: Scalar>() -> T {
    let base = lit::<T>(1e-10);
    let floor = T::epsilon() * lit::<T>(256.0);
    if floor > base {
        floor
    } else {
        base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_tol_matches_spec_for_f64() {
        assert_eq!(check_tol::<f64>(), 1e-10);
    }

    #[test]
    fn check_tol_widens_for_f32() {
        assert!(check_tol::<f32>() > 1e-6);
    }
}
