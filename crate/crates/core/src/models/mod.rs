//! Model functions `f`, `a`, `A`, the Riemann data `c^-`, `c^+` and the
//! chord of the isotherm between them.

mod adsorption;
mod capillary;
mod config;
mod flux;
mod validate;

pub use adsorption::{AdsorptionModel, CustomAdsorption, ScalarFn1};
pub use capillary::CapillaryModel;
pub use config::{AdsorptionConfig, CapillaryConfig, FluxConfig, ModelConfig};
pub use flux::{CoreyFlux, CustomFlux, FluxKind, FluxModel, Partial, ScalarFn2, TableFlux};
pub use validate::{Assumption, AssumptionCheck, ValidationReport, DEFAULT_GRID_N};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Complete model: flux, isotherm, capillarity and the left/right
/// concentrations of the Riemann data.
#[derive(Debug, Clone)]
pub struct ModelSet<T> {
    pub flux: FluxModel<T>,
    pub adsorption: AdsorptionModel<T>,
    pub capillarity: CapillaryModel<T>,
    pub c_minus: T,
    pub c_plus: T,
}

impl<T: Real> ModelSet<T> {
    pub fn new(
        flux: FluxModel<T>,
        adsorption: AdsorptionModel<T>,
        capillarity: CapillaryModel<T>,
        c_minus: T,
        c_plus: T,
    ) -> Result<Self> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(c_minus) || !unit(c_plus) {
            return Err(Error::Config(format!("concentrations must lie in [0,1], got c_minus = {c_minus}, c_plus = {c_plus}")));
        }
        if c_minus == c_plus {
            return Err(Error::DegenerateData(c_minus.as_f64()));
        }
        if c_plus > c_minus {
            return Err(Error::Config(format!(
                "c_plus = {c_plus} > c_minus = {c_minus}: data without a c-shock are not supported"
            )));
        }
        if !(flux.h_fd > T::zero()) {
            return Err(Error::Config("h_fd must be positive".into()));
        }
        capillarity.check_bounds()?;
        Ok(Self { flux, adsorption, capillarity, c_minus, c_plus })
    }

    /// Built-in non-monotone model: `mu(c) = 1 + 4 c (1 - c)`, `a = c/(1+c)`,
    /// `A = 1`, `c^- = 1`, `c^+ = 0`.
    pub fn boomerang() -> Self {
        Self::boomerang_with(T::lit(4.0))
    }

    pub fn boomerang_with(amplitude: T) -> Self {
        Self {
            flux: FluxModel::boomerang(amplitude),
            adsorption: AdsorptionModel::standard(),
            capillarity: CapillaryModel::default(),
            c_minus: T::one(),
            c_plus: T::zero(),
        }
    }

    pub fn with_flux(mut self, flux: FluxModel<T>) -> Self {
        self.flux = flux;
        self
    }

    pub fn with_adsorption(mut self, adsorption: AdsorptionModel<T>) -> Self {
        self.adsorption = adsorption;
        self
    }

    pub fn with_capillarity(mut self, capillarity: CapillaryModel<T>) -> Self {
        self.capillarity = capillarity;
        self
    }

    /// Chord of `a` through `(c^+, a(c^+))` and `(c^-, a(c^-))`.
    pub fn chord(&self) -> Result<ChordCoefficients<T>> {
        chord_coefficients(self)
    }

    /// Runs [`ModelSet::validate`] and turns a failing report into an error,
    /// unless `force` is set.
    pub fn ensure_valid(&self, force: bool) -> Result<ValidationReport> {
        let report = self.validate(DEFAULT_GRID_N)?;
        if !report.passed() && !force {
            return Err(Error::ModelRejected(report.summary()));
        }
        Ok(report)
    }
}

/// `L(c) = d1 c - d2`, the chord of the isotherm between the Riemann states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordCoefficients<T> {
    pub d1: T,
    pub d2: T,
}

impl<T: Real> ChordCoefficients<T> {
    #[inline]
    pub fn line(&self, c: T) -> T {
        self.d1 * c - self.d2
    }
}

pub fn chord_coefficients<T: Real>(model: &ModelSet<T>) -> Result<ChordCoefficients<T>> {
    let (cm, cp) = (model.c_minus, model.c_plus);
    if cm == cp {
        return Err(Error::DegenerateData(cm.as_f64()));
    }
    let am = model.adsorption.a(cm);
    let ap = model.adsorption.a(cp);
    let width = cm - cp;
    Ok(ChordCoefficients { d1: (am - ap) / width, d2: (cp * am - cm * ap) / width })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_isotherm(a: AdsorptionModel<f64>, cm: f64, cp: f64) -> ModelSet<f64> {
        ModelSet::new(FluxModel::boomerang(4.0), a, CapillaryModel::default(), cm, cp).unwrap()
    }

    #[test]
    fn chord_of_standard_isotherm() {
        let ch = ModelSet::<f64>::boomerang().chord().unwrap();
        assert_eq!(ch.d1, 0.5);
        assert_eq!(ch.d2, 0.0);
    }

    #[test]
    fn chord_of_linear_isotherm_is_itself() {
        let ch = with_isotherm(AdsorptionModel::Linear { slope: 1.0 }, 1.0, 0.0).chord().unwrap();
        assert_eq!((ch.d1, ch.d2), (1.0, 0.0));
    }

    #[test]
    fn chord_with_interior_right_state() {
        let m = with_isotherm(AdsorptionModel::Langmuir { amax: 2.0, k: 1.0 }, 1.0, 0.5);
        let ch = m.chord().unwrap();
        assert!((ch.d1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((ch.d2 + 1.0 / 3.0).abs() < 1e-15);
        assert!((ch.line(0.5) - m.adsorption.a(0.5)).abs() < 1e-15);
        assert!((ch.line(1.0) - m.adsorption.a(1.0)).abs() < 1e-15);
    }

    #[test]
    fn equal_concentrations_are_degenerate() {
        let r = ModelSet::new(
            FluxModel::<f64>::boomerang(4.0),
            AdsorptionModel::standard(),
            CapillaryModel::default(),
            0.5,
            0.5,
        );
        assert!(matches!(r, Err(Error::DegenerateData(_))));
        let mut m = ModelSet::<f64>::boomerang();
        m.c_plus = 1.0;
        assert!(matches!(chord_coefficients(&m), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn reversed_concentrations_are_rejected() {
        let r = ModelSet::new(
            FluxModel::<f64>::boomerang(4.0),
            AdsorptionModel::standard(),
            CapillaryModel::default(),
            0.2,
            0.8,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
