//! Echo under balanced single-atom spin flips γ_r and dephasing γ_z.
//!
//! The Heisenberg hierarchy closes on two damped oscillators,
//! f″ + 2γ_r f′ + χ²f = 0 and g″ + 2γ_r g′ + 4χ²g = 0, both started from
//! (1, 0). Reversing χ mid-echo restarts them from the mirrored state, so
//! every quantity below is a polynomial in the two fundamental solutions.

use super::{check_atoms, GainRoute, Route};
use crate::cavity::DecoherenceRates;
use crate::{Error, Real, Result};

/// y″ + 2γy′ + ω²y = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedOscillator<T> {
    pub damping: T,
    pub stiffness: T,
}

impl<T: Real> DampedOscillator<T> {
    /// Returns (u, u′, v) at t, where u starts at (1, 0) and v at (0, 1).
    /// Uses the over- or underdamped closed form, or the power series in
    /// ν²t² (ν² = γ² − ω²) near critical damping.
    pub fn eval(&self, t: T) -> (T, T, T) {
        let g = self.damping;
        let nu2 = g * g - self.stiffness;
        let z = nu2 * t * t;
        let decay = (-g * t).exp();
        // (e^{−γt}cosh νt, e^{−γt}sinh(νt)/ν)
        let (c, s) = if z.abs() <= T::one() {
            let (mut c, mut s) = (T::one(), T::one());
            let (mut tc, mut ts) = (T::one(), T::one());
            for k in 1..64 {
                let k2 = T::count(2 * k);
                tc = tc * z / (k2 * (k2 - T::one()));
                ts = ts * z / (k2 * (k2 + T::one()));
                c += tc;
                s += ts;
                if tc.abs() <= T::epsilon() * c.abs() && ts.abs() <= T::epsilon() * s.abs() {
                    break;
                }
            }
            (decay * c, decay * s * t)
        } else if nu2 > T::zero() {
            let nu = nu2.sqrt();
            let up = ((nu - g) * t).exp();
            let down = (-(nu + g) * t).exp();
            ((up + down) / T::lit(2.0), (up - down) / (T::lit(2.0) * nu))
        } else {
            let mu = (-nu2).sqrt();
            let (sn, cs) = (mu * t).sin_cos();
            (decay * cs, decay * sn / mu)
        };
        (c + g * s, -self.stiffness * s, s)
    }
}

/// f, g, their derivatives, and the (0, 1)-started companions v_f, v_g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpontFg<T> {
    pub f: T,
    pub f_prime: T,
    pub f_velocity: T,
    pub g: T,
    pub g_prime: T,
    pub g_velocity: T,
}

pub fn spont_fg<T: Real>(chi: T, gamma_r: T, t: T) -> Result<SpontFg<T>> {
    if !(gamma_r >= T::zero()) {
        return Err(Error::domain("flip rate must be non-negative"));
    }
    let f = DampedOscillator {
        damping: gamma_r,
        stiffness: chi * chi,
    };
    let g = DampedOscillator {
        damping: gamma_r,
        stiffness: T::lit(4.0) * chi * chi,
    };
    let (f0, f1, fv) = f.eval(t);
    let (g0, g1, gv) = g.eval(t);
    Ok(SpontFg {
        f: f0,
        f_prime: f1,
        f_velocity: fv,
        g: g0,
        g_prime: g1,
        g_velocity: gv,
    })
}

fn require_balanced<T: Real>(rates: &DecoherenceRates<T>) -> Result<()> {
    if !rates.is_balanced() {
        return Err(Error::Unsupported(
            "closed forms assume balanced flip rates γ₊ = γ₋".into(),
        ));
    }
    Ok(())
}

fn pairs<T: Real>(atoms: usize) -> T {
    let n = T::count(atoms);
    n * (n - T::one()) / T::lit(2.0)
}

/// (ΔS^y)² at φ → 0. Exact: N/4 + N(N−1)/8·e^{−4Γt₀}(1 − g̃^{N−2}) with
/// g̃ = g(t₀)² − g′(t₀)v_g(t₀). Approximate: (N/4)[1 + (8/3)(Nχ)²γ_r t₀³].
pub fn spont_noise<T: Real>(
    atoms: usize,
    chi: T,
    rates: &DecoherenceRates<T>,
    t0: T,
    route: Route,
) -> Result<T> {
    check_atoms(atoms)?;
    require_balanced(rates)?;
    let n = T::count(atoms);
    let quarter = n / T::lit(4.0);
    match route {
        Route::Exact => {
            let fg = spont_fg(chi, rates.gamma_r, t0)?;
            let g_tilde = fg.g * fg.g - fg.g_prime * fg.g_velocity;
            let decay = (-T::lit(4.0) * rates.total * t0).exp();
            Ok(quarter
                + pairs::<T>(atoms) / T::lit(4.0) * decay * (T::one() - g_tilde.powi(atoms as i32 - 2)))
        }
        Route::Approximate => Ok(quarter
            * (T::one()
                + T::lit(8.0 / 3.0) * (n * chi).powi(2) * rates.gamma_r * t0.powi(3))),
    }
}

/// ∂_φ⟨S^y⟩ at φ → 0.
pub fn spont_gain<T: Real>(
    atoms: usize,
    chi: T,
    rates: &DecoherenceRates<T>,
    t0: T,
    route: GainRoute,
) -> Result<T> {
    check_atoms(atoms)?;
    require_balanced(rates)?;
    let p = atoms as i32 - 2;
    let n = T::count(atoms);
    let decay3 = (-T::lit(3.0) * rates.total * t0).exp();
    match route {
        GainRoute::Exact => {
            let fg = spont_fg(chi, rates.gamma_r, t0)?;
            let mixed = fg.f * fg.g - fg.f_velocity * fg.g_prime / T::lit(2.0);
            Ok(pairs::<T>(atoms) * decay3 * chi * fg.f_velocity / T::lit(2.0)
                * (mixed.powi(p) + fg.f.powi(p)))
        }
        GainRoute::FTilde => {
            let fg = spont_fg(chi, rates.gamma_r, t0)?;
            let re = fg.f * fg.f - fg.f_prime * fg.f_velocity;
            let a = chi * t0;
            let im_slope = chi * (T::one() - (n - T::lit(2.0)) * a * a) * fg.f_velocity;
            Ok(pairs::<T>(atoms) * re.powi(p) * im_slope * decay3)
        }
        GainRoute::Approximate => Ok(pairs::<T>(atoms)
            * chi
            * t0
            * (-T::lit(4.0) * rates.gamma_r * t0).exp()
            * (-T::lit(1.5) * rates.gamma_z * t0).exp()),
    }
}

/// ξ² = N(ΔS^y)²/(∂_φ⟨S^y⟩)², or [1+(8γ_r+3γ_z)t₀]/(Nχt₀)² + (8/3)γ_r t₀.
pub fn spont_xi2<T: Real>(
    atoms: usize,
    chi: T,
    rates: &DecoherenceRates<T>,
    t0: T,
    route: Route,
) -> Result<T> {
    check_atoms(atoms)?;
    require_balanced(rates)?;
    let n = T::count(atoms);
    match route {
        Route::Exact => {
            let noise = spont_noise(atoms, chi, rates, t0, Route::Exact)?;
            let gain = spont_gain(atoms, chi, rates, t0, GainRoute::Exact)?;
            if gain == T::zero() {
                return Ok(T::infinity());
            }
            Ok(n * noise / (gain * gain))
        }
        Route::Approximate => {
            let a = n * chi * t0;
            if a == T::zero() {
                return Ok(T::infinity());
            }
            let lin = (T::lit(8.0) * rates.gamma_r + T::lit(3.0) * rates.gamma_z) * t0;
            Ok((T::one() + lin) / (a * a) + T::lit(8.0 / 3.0) * rates.gamma_r * t0)
        }
    }
}
