//! Physical constants (CODATA 2018 exact or recommended values) and species
//! presets. These are inputs to the models.

use std::f64::consts::PI;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Standard gravity, m/s² (exact by convention).
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// Preset atomic data: mass in u, relevant excited-state linewidth in rad/s,
/// and the lattice/cavity wavelength pair in m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesPreset {
    pub label: &'static str,
    pub mass_u: f64,
    pub linewidth: f64,
    pub lattice_wavelength: f64,
    pub cavity_wavelength: f64,
}

impl SpeciesPreset {
    pub fn mass_kg(&self) -> f64 {
        self.mass_u * ATOMIC_MASS_UNIT
    }
}

/// ⁸⁷Rb: atomic mass (AME2016), D2 line natural width 2π × 6.0666 MHz.
pub const RB87: SpeciesPreset = SpeciesPreset {
    label: "rb87",
    mass_u: 86.909_180_527,
    linewidth: 2.0 * PI * 6.0666e6,
    lattice_wavelength: 532e-9,
    cavity_wavelength: 780e-9,
};

/// ¹⁷¹Yb: atomic mass (AME2016), ¹S₀–³P₁ intercombination width 2π × 182 kHz.
pub const YB171: SpeciesPreset = SpeciesPreset {
    label: "yb171",
    mass_u: 170.936_325_8,
    linewidth: 2.0 * PI * 182e3,
    lattice_wavelength: 413e-9,
    cavity_wavelength: 556e-9,
};

pub fn preset(label: &str) -> Option<SpeciesPreset> {
    match label.to_ascii_lowercase().as_str() {
        "rb87" => Some(RB87),
        "yb171" => Some(YB171),
        _ => None,
    }
}
