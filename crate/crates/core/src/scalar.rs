//! Numeric backends for the pool engine.
//!
//! The engine is written once against [`Scalar`] and instantiated with `f64`
//! for production use or with [`Rational`](crate::Rational) when algebraic
//! invariants must hold bit-for-bit.

use core::fmt::Debug;

use num_traits::Num;

/// A real-number representation the pool engine can run on.
///
/// Only field operations are required to be exact. [`Scalar::sqrt`] is exact
/// where the backend can represent the root and correctly rounded (or a close
/// approximation) otherwise; the swap equations never call it.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    /// Square root of a non-negative value.
    fn sqrt(&self) -> Self;

    /// Lossy conversion used for reporting and tolerance checks.
    fn to_f64(&self) -> f64;

    /// Conversion from a finite float. `None` for NaN or infinities.
    fn from_f64(value: f64) -> Option<Self>;

    /// `true` when field operations are exact.
    fn is_exact() -> bool;

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    /// `|self - other| <= rel * max(|self|, |other|)`.
    fn approx_eq_rel(&self, other: &Self, rel: f64) -> bool {
        if self == other {
            return true;
        }
        let tol = match Self::from_f64(rel) {
            Some(t) => t,
            None => return false,
        };
        let a = self.abs_diff(&Self::zero());
        let b = other.abs_diff(&Self::zero());
        let scale = if a > b { a } else { b };
        self.abs_diff(other) <= tol * scale
    }
}

impl Scalar for f64 {
    fn sqrt(&self) -> Self {
        libm::sqrt(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(value: f64) -> Option<Self> {
        value.is_finite().then_some(value)
    }

    fn is_exact() -> bool {
        false
    }
}

#[cfg(feature = "rational")]
mod rational_impl {
    use num_bigint::BigInt;
    use num_traits::{Signed, ToPrimitive, Zero};

    use super::Scalar;
    use crate::Rational;

    fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
        if n.is_negative() {
            return None;
        }
        let root = n.sqrt();
        (&root * &root == *n).then_some(root)
    }

    impl Scalar for Rational {
        /// Exact when numerator and denominator are perfect squares, otherwise
        /// the float root converted back exactly.
        fn sqrt(&self) -> Self {
            if self.is_zero() {
                return Rational::zero();
            }
            if let (Some(n), Some(d)) = (exact_sqrt(self.numer()), exact_sqrt(self.denom())) {
                return Rational::new(n, d);
            }
            let approx = libm::sqrt(Scalar::to_f64(self));
            Rational::from_float(approx).unwrap_or_else(Rational::zero)
        }

        fn to_f64(&self) -> f64 {
            ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
        }

        fn from_f64(value: f64) -> Option<Self> {
            Rational::from_float(value)
        }

        fn is_exact() -> bool {
            true
        }
    }
}
