//! JSON model configuration.
//!
//! ```json
//! { "flux": {"kind": "boomerang", "amplitude": 4.0},
//!   "adsorption": {"kind": "langmuir", "amax": 1.0, "k": 1.0},
//!   "capillarity": {"kind": "constant", "value": 1.0},
//!   "c_minus": 1.0, "c_plus": 0.0 }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AdsorptionModel, CapillaryModel, FluxKind, FluxModel, ModelSet, TableFlux};
use crate::error::{Error, Result};
use crate::real::Real;

fn four() -> f64 {
    4.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxConfig {
    Boomerang {
        #[serde(default = "four")]
        amplitude: f64,
    },
    Corey {
        #[serde(alias = "nw")]
        water_exponent: f64,
        #[serde(alias = "no")]
        oil_exponent: f64,
        /// Polynomial coefficients of the viscosity ratio in `c`, lowest first.
        #[serde(alias = "mu")]
        viscosity: Vec<f64>,
    },
    Table {
        s: Vec<f64>,
        c: Vec<f64>,
        /// `f[j][i] = f(s[i], c[j])`.
        f: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdsorptionConfig {
    Langmuir {
        #[serde(default = "one")]
        amax: f64,
        #[serde(default = "one")]
        k: f64,
    },
    Linear {
        slope: f64,
    },
}

impl Default for AdsorptionConfig {
    fn default() -> Self {
        Self::Langmuir { amax: 1.0, k: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CapillaryConfig {
    Constant { value: f64 },
    Affine { base: f64, s_coef: f64, c_coef: f64 },
}

impl Default for CapillaryConfig {
    fn default() -> Self {
        Self::Constant { value: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub flux: FluxConfig,
    #[serde(default)]
    pub adsorption: AdsorptionConfig,
    #[serde(default)]
    pub capillarity: CapillaryConfig,
    #[serde(default = "one")]
    pub c_minus: f64,
    #[serde(default)]
    pub c_plus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_fd: Option<f64>,
}

impl ModelConfig {
    pub fn boomerang() -> Self {
        Self {
            name: Some("boomerang".into()),
            flux: FluxConfig::Boomerang { amplitude: 4.0 },
            adsorption: AdsorptionConfig::default(),
            capillarity: CapillaryConfig::default(),
            c_minus: 1.0,
            c_plus: 0.0,
            h_fd: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn build<T: Real>(&self) -> Result<ModelSet<T>> {
        let l = T::lit;
        let mut flux = match &self.flux {
            FluxConfig::Boomerang { amplitude } => FluxModel::boomerang(l(*amplitude)),
            FluxConfig::Corey { water_exponent, oil_exponent, viscosity } => {
                if *water_exponent < 1.0 || *oil_exponent < 1.0 {
                    return Err(Error::Config("Corey exponents must be >= 1".into()));
                }
                if viscosity.is_empty() {
                    return Err(Error::Config("Corey viscosity polynomial is empty".into()));
                }
                FluxModel::corey(l(*water_exponent), l(*oil_exponent), viscosity.iter().map(|&x| l(x)).collect())
            }
            FluxConfig::Table { s, c, f } => {
                let conv = |v: &[f64]| v.iter().map(|&x| l(x)).collect::<Vec<T>>();
                let table = TableFlux::new(conv(s), conv(c), f.iter().map(|row| conv(row)).collect())?;
                FluxModel::new(FluxKind::Table(table))
            }
        };
        if let Some(h) = self.h_fd {
            flux.h_fd = l(h);
        }
        let adsorption = match self.adsorption {
            AdsorptionConfig::Langmuir { amax, k } => AdsorptionModel::Langmuir { amax: l(amax), k: l(k) },
            AdsorptionConfig::Linear { slope } => AdsorptionModel::Linear { slope: l(slope) },
        };
        let capillarity = match self.capillarity {
            CapillaryConfig::Constant { value } => CapillaryModel::Constant(l(value)),
            CapillaryConfig::Affine { base, s_coef, c_coef } => {
                CapillaryModel::Affine { base: l(base), s_coef: l(s_coef), c_coef: l(c_coef) }
            }
        };
        ModelSet::new(flux, adsorption, capillarity, l(self.c_minus), l(self.c_plus))
    }
}
