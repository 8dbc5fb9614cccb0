//! Echo under collective dephasing Γ_z D[S^z] from cavity loss.

use super::{check_atoms, Route};
use crate::numerics::{minimize_positive, Minimum};
use crate::{Real, Result};

/// (ΔS^y)² at φ → 0: ½[S(S+½) − S(S−½)e^{−4Γ_z t₀}], or (S/2)(1+4SΓ_z t₀).
pub fn dephasing_noise<T: Real>(atoms: usize, gamma_z: T, t0: T, route: Route) -> Result<T> {
    check_atoms(atoms)?;
    let s = T::count(atoms) / T::lit(2.0);
    let half = T::lit(0.5);
    let x = gamma_z * t0;
    Ok(match route {
        Route::Exact => half * (s * (s + half) - s * (s - half) * (-T::lit(4.0) * x).exp()),
        Route::Approximate => s / T::lit(2.0) * (T::one() + T::lit(4.0) * s * x),
    })
}

/// ∂_φ⟨S^y⟩ at φ → 0: S(2S−1)sin(χt₀)cos^{2S−2}(χt₀)cosh(Γ_z t₀)e^{−3Γ_z t₀/2}.
pub fn dephasing_gain<T: Real>(atoms: usize, chi: T, gamma_z: T, t0: T) -> Result<T> {
    check_atoms(atoms)?;
    let s = T::count(atoms) / T::lit(2.0);
    let a = chi * t0;
    let x = gamma_z * t0;
    // cosh(x)e^{−3x/2} written without the growing exponential.
    let damping = ((-x / T::lit(2.0)).exp() + (-T::lit(2.5) * x).exp()) / T::lit(2.0);
    Ok(s * (T::lit(2.0) * s - T::one()) * a.sin() * a.cos().powi(atoms as i32 - 2) * damping)
}

/// ξ² = N(ΔS^y)²/(∂_φ⟨S^y⟩)², or (1+2NΓ_z t₀)/(Nχt₀)² + 1/N + ½(χt₀)².
/// A vanishing slope gives +∞.
pub fn dephasing_xi2<T: Real>(atoms: usize, chi: T, gamma_z: T, t0: T, route: Route) -> Result<T> {
    check_atoms(atoms)?;
    let n = T::count(atoms);
    match route {
        Route::Exact => {
            let noise = dephasing_noise(atoms, gamma_z, t0, Route::Exact)?;
            let gain = dephasing_gain(atoms, chi, gamma_z, t0)?;
            if gain == T::zero() {
                return Ok(T::infinity());
            }
            Ok(n * noise / (gain * gain))
        }
        Route::Approximate => {
            let a = chi * t0;
            if a == T::zero() {
                return Ok(T::infinity());
            }
            Ok((T::one() + T::lit(2.0) * n * gamma_z * t0) / (n * a).powi(2)
                + T::one() / n
                + a * a / T::lit(2.0))
        }
    }
}

/// Lossless optimum of the exact ξ² over χt₀, searched from 1/√N.
pub fn ideal_optimum<T: Real>(atoms: usize) -> Result<Minimum<T>> {
    check_atoms(atoms)?;
    let x0 = T::one() / T::count(atoms).sqrt();
    minimize_positive(
        |a| dephasing_xi2(atoms, T::one(), T::zero(), a, Route::Exact),
        x0,
        T::lit(1e-8),
    )
}
