//! Capillary coefficient `A(s, c)`, bounded and separated from zero.

use std::fmt;

use super::flux::ScalarFn2;
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone)]
pub enum CapillaryModel<T> {
    Constant(T),
    /// `base + s_coef s + c_coef c`.
    Affine { base: T, s_coef: T, c_coef: T },
    Custom { a: ScalarFn2<T>, lo: T, hi: T },
}

impl<T: fmt::Debug> fmt::Debug for CapillaryModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Self::Affine { base, s_coef, c_coef } => f
                .debug_struct("Affine")
                .field("base", base)
                .field("s_coef", s_coef)
                .field("c_coef", c_coef)
                .finish(),
            Self::Custom { lo, hi, .. } => f.debug_struct("Custom").field("lo", lo).field("hi", hi).finish(),
        }
    }
}

impl<T: Real> Default for CapillaryModel<T> {
    fn default() -> Self {
        Self::Constant(T::one())
    }
}

impl<T: Real> CapillaryModel<T> {
    #[inline]
    pub fn value(&self, s: T, c: T) -> T {
        match self {
            Self::Constant(v) => *v,
            Self::Affine { base, s_coef, c_coef } => *base + *s_coef * s + *c_coef * c,
            Self::Custom { a, .. } => a(s, c),
        }
    }

    /// Declared `(A_lo, A_hi)`; exact for the closed-form kinds.
    pub fn bounds(&self) -> (T, T) {
        match self {
            Self::Constant(v) => (*v, *v),
            Self::Affine { base, s_coef, c_coef } => {
                let corners = [
                    *base,
                    *base + *s_coef,
                    *base + *c_coef,
                    *base + *s_coef + *c_coef,
                ];
                let lo = corners.iter().copied().fold(T::infinity(), T::min);
                let hi = corners.iter().copied().fold(T::neg_infinity(), T::max);
                (lo, hi)
            }
            Self::Custom { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub(crate) fn check_bounds(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !(lo > T::zero()) || !hi.is_finite() || hi < lo {
            return Err(Error::Config(format!("capillary bounds must satisfy 0 < lo <= hi < inf, got ({lo}, {hi})")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_bounds_come_from_corners() {
        let m = CapillaryModel::<f64>::Affine { base: 1.0, s_coef: -0.5, c_coef: 0.25 };
        assert_eq!(m.bounds(), (0.5, 1.25));
        assert!(m.check_bounds().is_ok());
        let bad = CapillaryModel::<f64>::Affine { base: 0.5, s_coef: -0.5, c_coef: 0.0 };
        assert!(bad.check_bounds().is_err());
    }
}
