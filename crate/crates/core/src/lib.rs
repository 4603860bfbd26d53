//! Thermal-noise floor of crystalline whispering-gallery resonators.
//!
//! The crate is organised bottom-up: temperature-dependent material data,
//! asymptotic mode estimates, an axisymmetric finite-element solver for the
//! strain energy under conjugate loads, and the fluctuation-dissipation
//! formulas that turn energies and forces into Allan deviations.

pub mod constants;
pub mod elastostatics;
pub mod materials;
pub mod modes;
pub mod noise;
pub mod pipeline;
