//! Special functions and generic numerical kernels.

pub mod band;
pub mod bessel;
pub mod hyp;
pub mod ode;
pub mod optimize;
pub mod quad;
pub mod summation;

pub use band::{band_energy, band_energy_dv0, ground_band, BandState, PlaneWaveBasis};
pub use bessel::{bessel_j, bessel_j0_roots, bessel_j_range};
pub use hyp::{
    hyp2f1_neg_int, hyp2f1_neg_int_exact, hyp2f1_neg_int_leading_conditioned, hyp2f1_neg_int_leading_normalized,
    Conditioned,
};
pub use ode::{Dopri5, OdeScalar, OdeStats};
pub use optimize::{bisect, bracketed_roots, golden_section, minimize_positive, Minimum};
pub use quad::{periodic_trapezoid, trapezoid};
pub use summation::NeumaierSum;
