//! Scalar abstraction used throughout the crate.
//!
//! Every model, envelope, portrait and connection routine is written against
//! [`Real`], so the same code runs in `f64` (the default for all solvers) and
//! in `f32` for quick, low-precision evaluations.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar accepted by the solvers.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; saturates instead of failing.
    #[inline]
    fn lit(x: f64) -> Self {
        let sat = || if x > 0.0 { Self::max_value() } else { Self::min_value() };
        match Self::from_f64(x) {
            Some(v) if v.is_infinite() && x.is_finite() => sat(),
            Some(v) => v,
            None => sat(),
        }
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Raises to a real power, using `powi` for small integral exponents.
    #[inline]
    fn pow_real(self, e: Self) -> Self {
        if e.fract() == Self::zero() && e.abs() <= Self::lit(16.0) {
            self.powi(e.to_i32().unwrap_or(0))
        } else {
            self.powf(e)
        }
    }

    /// Relative tolerance floor for this precision.
    #[inline]
    fn tol_floor(tol: f64) -> Self {
        Self::lit(tol).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Floor for perturbation sizes whose error is quadratic in the size.
    #[inline]
    fn offset_floor(tol: f64) -> Self {
        Self::lit(tol).max(Self::epsilon().sqrt() * Self::lit(4.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_conversion() {
        assert_eq!(<f64 as Real>::lit(0.25), 0.25);
        assert_eq!(<f32 as Real>::lit(0.5), 0.5f32);
        assert_eq!(<f32 as Real>::lit(1e300), f32::MAX);
    }

    #[test]
    fn integral_powers_match_powf() {
        let x = 0.37f64;
        assert!((x.pow_real(2.0) - x.powf(2.0)).abs() < 1e-15);
        assert!((x.pow_real(2.5) - x.powf(2.5)).abs() < 1e-15);
    }

    #[test]
    fn tolerance_floor_tracks_precision() {
        assert_eq!(<f64 as Real>::tol_floor(1e-10), 1e-10);
        assert!(<f32 as Real>::tol_floor(1e-10) > 1e-6);
    }
}
