//! Single-atom dephasing γ̃_z during the interrogation time τ.

use super::check_atoms;
use crate::{Error, Real, Result};

/// Δg/g for a coherent and for a squeezed input, in units of 1/√(T/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterrogationSensitivity<T> {
    /// [1/(ω_g√(NT))]√(e^{γ̃_zτ}/τ).
    pub coherent: T,
    /// [1/(ω_g√(NT))]√((e^{γ̃_zτ} − 1 + ξ²)/τ).
    pub squeezed: T,
}

pub fn interrogation_sensitivity<T: Real>(
    atoms: usize,
    xi2: T,
    dephasing: T,
    tau: T,
    averaging: T,
    omega_g: T,
) -> Result<InterrogationSensitivity<T>> {
    if atoms == 0 {
        return Err(Error::domain("need at least one atom"));
    }
    if !(tau > T::zero()) || !(averaging > T::zero()) {
        return Err(Error::domain("interrogation and averaging times must be positive"));
    }
    if !(omega_g > T::zero()) || !(dephasing >= T::zero()) || !(xi2 > T::zero()) {
        return Err(Error::domain("ω_g and ξ² must be positive, γ̃_z non-negative"));
    }
    let prefactor = T::one() / (omega_g * (T::count(atoms) * averaging).sqrt());
    let growth = (dephasing * tau).exp();
    Ok(InterrogationSensitivity {
        coherent: prefactor * (growth / tau).sqrt(),
        squeezed: prefactor * (((dephasing * tau).exp_m1() + xi2) / tau).sqrt(),
    })
}

/// Ramsey squeezing of the one-axis-twisted state and the rotation angle
/// about x̂ that minimises it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySqueezing<T> {
    pub xi2: T,
    pub angle: T,
}

/// ξ² = min_ϕ N(ΔS_ϕ^⊥)²/|⟨S⟩|² built from the initial correlators
/// ⟨σ⁺⟩ = ½cos^{N−1}(χt₀) and ⟨σ₁⁺σ₂^∓⟩ after twisting for χt₀. The
/// ϕ-dependence is A cos²ϕ − B sinϕ cosϕ with
/// A = ⅛(1 − cos^{N−2}2χt₀) and B = ½cos^{N−2}(χt₀)sin(χt₀), whose minimum
/// over ϕ is (A − √(A² + B²))/2.
pub fn ramsey_squeezing<T: Real>(atoms: usize, chi_t0: T) -> Result<RamseySqueezing<T>> {
    check_atoms(atoms)?;
    let n = T::count(atoms);
    let p = atoms as i32 - 2;
    let a = (T::one() - (T::lit(2.0) * chi_t0).cos().powi(p)) / T::lit(8.0);
    let b = chi_t0.cos().powi(p) * chi_t0.sin() / T::lit(2.0);
    let min = (a - a.hypot(b)) / T::lit(2.0);
    // A cos²ϕ − B sinϕ cosϕ = A/2 + (R/2)cos(2ϕ + atan2(B, A)).
    let angle = (T::PI() - b.atan2(a)) / T::lit(2.0);
    let variance = n / T::lit(4.0) + n * (n - T::one()) * min;
    let mean = n / T::lit(2.0) * chi_t0.cos().powi(atoms as i32 - 1);
    if mean == T::zero() {
        return Err(Error::domain("mean spin vanishes at this twisting angle"));
    }
    Ok(RamseySqueezing {
        xi2: n * variance / (mean * mean),
        angle,
    })
}
