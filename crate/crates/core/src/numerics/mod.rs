//! Small numerical kernels shared by the solvers: bracketing root finders,
//! golden-section search and an adaptive Dormand–Prince integrator.

pub mod ode;
pub mod optimize;
pub mod roots;

pub use ode::{Dopri5, OdeSolution, Termination};
pub use optimize::{golden_section_max, golden_section_min};
pub use roots::{bisect, scan_roots};
