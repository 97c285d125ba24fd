//! Riemann solutions for the two-component chemical flooding system
//!
//! ```text
//! s_t + f(s, c)_x = 0
//! (c s + a(c))_t + (c f(s, c))_x = 0
//! ```
//!
//! admitted by vanishing capillarity together with either non-equilibrium
//! adsorption or diffusion. The non-classical piece is an undercompressive
//! c-shock whose speed depends on the ratio `kappa` of the two small
//! parameters. It is found by shooting a saddle-to-saddle connection of a
//! planar travelling-wave system.
//!
//! All solvers are generic over [`Real`]; the `*64` and `*32` aliases below
//! fix the precision.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod connect;
pub mod error;
pub mod io;
pub mod models;
pub mod numerics;
pub mod pdesim;
pub mod real;
pub mod riemann;
pub mod scalar;
pub mod tol;
pub mod twave;

pub use error::{Error, Result};
pub use models::{chord_coefficients, AdsorptionModel, CapillaryModel, ChordCoefficients, FluxModel, ModelConfig, ModelSet};
pub use real::Real;
pub use tol::Tolerances;

pub type ModelSet64 = ModelSet<f64>;
pub type ModelSet32 = ModelSet<f32>;
pub type FluxModel64 = FluxModel<f64>;
pub type FluxModel32 = FluxModel<f32>;
