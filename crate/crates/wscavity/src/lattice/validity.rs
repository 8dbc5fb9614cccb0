use super::{tunneling, LatticeConfig, WsLattice};
use crate::numerics::{bessel_j, periodic_trapezoid};
use crate::{Error, Real, Result};

/// Tight-binding and cavity-hopping diagnostics at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport<T> {
    /// |J₀,₂/J₀,₁|.
    pub tunneling_ratio: T,
    /// Time-averaged nearest-neighbour leakage 𝒫̄₁.
    pub hopping_probability: T,
    /// Small-amplitude estimate 2(K|α|²/Mga_l)².
    pub hopping_probability_estimate: T,
    /// Peak nearest-neighbour cavity hopping K|α|²/Mga_l.
    pub hopping_ratio: T,
    /// η|α|²ħ/Mga_l.
    pub stark_shift_ratio: T,
}

/// 𝒫_n(t) = J_n[4(K|α|²/Mga_l)|sin(Mga_l t/2ħ)|]² with `bloch_phase` = Mga_l t/ħ.
pub fn hopping_probability<T: Real>(n: i32, hopping_ratio: T, bloch_phase: T) -> Result<T> {
    let arg = T::lit(4.0) * hopping_ratio * (bloch_phase / T::lit(2.0)).sin().abs();
    let j = bessel_j(n, arg)?;
    Ok(j * j)
}

/// Leakage to the neighbouring sites when the cavity field shifts the
/// ground state by `stark_shift_ratio`·Mga_l. Evaluated with 𝒢⁰_↑ = 𝒢⁰_↓ and
/// Δ_↑ = −Δ_↓, so that K|α|²/Mga_l = ½·ratio·𝒞|J₁(X)| at its peak.
pub fn hopping_validity<T: Real>(cfg: &LatticeConfig<T>, stark_shift_ratio: T) -> Result<ValidityReport<T>> {
    if !(stark_shift_ratio >= T::zero()) {
        return Err(Error::domain("stark shift ratio must be non-negative"));
    }
    let lat = WsLattice::new(cfg)?;
    let j1 = lat.tunneling;
    let j2 = tunneling(cfg.depth, 2)?;
    let hop = stark_shift_ratio / T::lit(2.0) * lat.contrast * bessel_j(1, lat.bessel_argument())?.abs();
    // 𝒫₁ averaged over a Bloch period.
    let tol = T::lit(1e-14).max(T::lit(16.0) * T::epsilon());
    let [mean] = periodic_trapezoid(
        |theta: T| Ok([hopping_probability(1, hop, theta)?]),
        T::zero(),
        T::TAU(),
        tol,
    )?;
    Ok(ValidityReport {
        tunneling_ratio: (j2 / j1).abs(),
        hopping_probability: mean / T::TAU(),
        hopping_probability_estimate: T::lit(2.0) * hop * hop,
        hopping_ratio: hop,
        stark_shift_ratio,
    })
}
