//! Wannier-Stark physics of atoms in a tilted 1D lattice inside a cavity.
//!
//! Positions are measured in lattice spacings a_l and energies in recoil
//! units E_R, so the lattice potential reads v0·sin²(πz).

mod stark;
mod tunneling;
mod validity;
mod wannier;

pub use stark::{
    delta_chi, eta_profile, magic_depths, overlap_integral, CouplingProfile, OverlapMethod,
    WannierStarkState, WsLattice,
};
pub use tunneling::{tight_binding_tunneling, tunneling};
pub use validity::{hopping_probability, hopping_validity, ValidityReport};
pub use wannier::{contrast, wannier_function, WannierFunction};

use crate::constants::{self, HBAR};
use crate::{Error, Real, Result};

/// Atom with its mass (kg) and excited-state linewidth γ (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies<T> {
    pub label: String,
    pub mass: T,
    pub linewidth: T,
}

impl<T: Real> AtomSpecies<T> {
    pub fn new(label: impl Into<String>, mass: T, linewidth: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::domain("atomic mass must be positive"));
        }
        if !(linewidth >= T::zero()) {
            return Err(Error::domain("linewidth must be non-negative"));
        }
        Ok(Self {
            label: label.into(),
            mass,
            linewidth,
        })
    }

    pub fn from_preset(p: &constants::SpeciesPreset) -> Self {
        Self {
            label: p.label.to_string(),
            mass: T::lit(p.mass_kg()),
            linewidth: T::lit(p.linewidth),
        }
    }
}

/// Species, lattice and cavity wavelengths (m), depth (E_R) and gravity
/// (m/s²). All length and energy scales derive from these.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig<T> {
    pub species: AtomSpecies<T>,
    pub lattice_wavelength: T,
    pub cavity_wavelength: T,
    pub depth: T,
    pub gravity: T,
}

impl<T: Real> LatticeConfig<T> {
    pub fn new(
        species: AtomSpecies<T>,
        lattice_wavelength: T,
        cavity_wavelength: T,
        depth: T,
        gravity: T,
    ) -> Result<Self> {
        for (name, v) in [
            ("lattice wavelength", lattice_wavelength),
            ("cavity wavelength", cavity_wavelength),
            ("gravity", gravity),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        if !(depth >= T::zero()) {
            return Err(Error::domain("lattice depth must be non-negative"));
        }
        Ok(Self {
            species,
            lattice_wavelength,
            cavity_wavelength,
            depth,
            gravity,
        })
    }

    /// Species preset with its wavelength pair and standard gravity.
    pub fn preset(p: &constants::SpeciesPreset, depth: T) -> Self {
        Self {
            species: AtomSpecies::from_preset(p),
            lattice_wavelength: T::lit(p.lattice_wavelength),
            cavity_wavelength: T::lit(p.cavity_wavelength),
            depth,
            gravity: T::lit(constants::STANDARD_GRAVITY),
        }
    }

    pub fn with_depth(&self, depth: T) -> Self {
        Self {
            depth,
            ..self.clone()
        }
    }

    /// a_l = λ_l/2, m.
    pub fn lattice_spacing(&self) -> T {
        self.lattice_wavelength / T::lit(2.0)
    }

    /// k_l = 2π/λ_l, 1/m.
    pub fn lattice_wavenumber(&self) -> T {
        T::TAU() / self.lattice_wavelength
    }

    /// k_c = 2π/λ_c, 1/m.
    pub fn cavity_wavenumber(&self) -> T {
        T::TAU() / self.cavity_wavelength
    }

    /// Cavity wavenumber in units of 1/a_l.
    pub fn cavity_wavenumber_per_site(&self) -> T {
        self.cavity_wavenumber() * self.lattice_spacing()
    }

    /// E_R = ħ²k_l²/2M, J. Evaluated in double precision because ħ² is
    /// below the single-precision range.
    pub fn recoil_energy(&self) -> T {
        let k = self.lattice_wavenumber().lossy_f64();
        T::lit(HBAR * HBAR * k * k / (2.0 * self.species.mass.lossy_f64()))
    }

    /// φ = 2πλ_l/λ_c, the cavity phase advance per lattice site.
    pub fn phase_mismatch(&self) -> T {
        T::TAU() * self.lattice_wavelength / self.cavity_wavelength
    }

    /// Stark gap M g a_l, J.
    pub fn stark_gap(&self) -> T {
        let v = self.species.mass.lossy_f64()
            * self.gravity.lossy_f64()
            * self.lattice_spacing().lossy_f64();
        T::lit(v)
    }

    /// M g a_l / E_R.
    pub fn stark_ratio(&self) -> T {
        T::lit(self.stark_gap().lossy_f64() / self.recoil_energy().lossy_f64())
    }

    /// Bloch angular frequency M g a_l/ħ, rad/s.
    pub fn bloch_frequency(&self) -> T {
        T::lit(self.stark_gap().lossy_f64() / HBAR)
    }
}
