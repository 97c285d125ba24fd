//! Equilibrium adsorption isotherms `a(c)`.

use std::fmt;
use std::sync::Arc;

use super::flux::{fd_first, fd_second};
use crate::real::Real;

pub type ScalarFn1<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub struct CustomAdsorption<T> {
    pub a: ScalarFn1<T>,
    pub da: Option<ScalarFn1<T>>,
    pub dda: Option<ScalarFn1<T>>,
}

impl<T> fmt::Debug for CustomAdsorption<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomAdsorption")
            .field("da", &self.da.is_some())
            .field("dda", &self.dda.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum AdsorptionModel<T> {
    /// `amax k c / (1 + k c)`.
    Langmuir { amax: T, k: T },
    /// `slope c`; not strictly concave, kept for degenerate-case checks.
    Linear { slope: T },
    Custom(CustomAdsorption<T>),
}

impl<T: Real> AdsorptionModel<T> {
    /// The default isotherm `c / (1 + c)`.
    pub fn standard() -> Self {
        Self::Langmuir { amax: T::one(), k: T::one() }
    }

    pub fn custom<F>(a: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::Custom(CustomAdsorption { a: Arc::new(a), da: None, dda: None })
    }

    const H: f64 = 1e-6;

    pub fn a(&self, c: T) -> T {
        match self {
            Self::Langmuir { amax, k } => *amax * *k * c / (T::one() + *k * c),
            Self::Linear { slope } => *slope * c,
            Self::Custom(m) => (m.a)(c),
        }
    }

    pub fn da(&self, c: T) -> T {
        match self {
            Self::Langmuir { amax, k } => {
                let d = T::one() + *k * c;
                *amax * *k / (d * d)
            }
            Self::Linear { slope } => *slope,
            Self::Custom(CustomAdsorption { da: Some(g), .. }) => g(c),
            Self::Custom(_) => fd_first(|x| self.a(x), c, T::lit(Self::H), T::zero(), T::one()),
        }
    }

    pub fn dda(&self, c: T) -> T {
        match self {
            Self::Langmuir { amax, k } => {
                let d = T::one() + *k * c;
                -T::lit(2.0) * *amax * *k * *k / (d * d * d)
            }
            Self::Linear { .. } => T::zero(),
            Self::Custom(CustomAdsorption { dda: Some(g), .. }) => g(c),
            Self::Custom(_) => fd_second(|x| self.a(x), c, T::lit(1e-4), T::zero(), T::one()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn langmuir_derivatives_match_differences() {
        let m = AdsorptionModel::<f64>::standard();
        let h = 1e-5;
        for c in [0.1, 0.5, 0.9] {
            let fd = (m.a(c + h) - m.a(c - h)) / (2.0 * h);
            assert!((m.da(c) - fd).abs() < 1e-9);
            let fdd = (m.da(c + h) - m.da(c - h)) / (2.0 * h);
            assert!((m.dda(c) - fdd).abs() < 1e-8);
        }
        assert_eq!(m.a(0.0), 0.0);
        assert_eq!(m.a(1.0), 0.5);
    }

    #[test]
    fn custom_falls_back_to_differences() {
        let m = AdsorptionModel::<f64>::custom(|c| c - 0.25 * c * c);
        assert!((m.da(0.5) - 0.75).abs() < 1e-8);
        assert!((m.dda(0.5) + 0.5).abs() < 1e-5);
    }
}
