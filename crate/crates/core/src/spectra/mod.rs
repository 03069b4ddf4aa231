//! Flat-torus Hodge spectra, metric comparison of eigenvalues, and the Hopf-flow Rayleigh
//! quotient on S³.

pub mod dodziuk;
pub mod hopf;
pub mod torus;

pub use dodziuk::{dodziuk_check, metric_bounds, DodziukReport};
pub use hopf::{hopf_rayleigh, rayleigh_scan, HopfFormModel, RayleighResult};
pub use torus::{binom, count_small, torus_hodge_spectrum, torus_spectrum_up_to, TorusSpectrum, FOUR_PI2};
