//! Closed-form metrology of the twisting echo: twist for t₀, rotate by φ
//! about ŷ, untwist for t₀, read out S^y.
//!
//! Every leading-order formula is paired with an exact assembly from the
//! same intermediate objects. [`Route`] selects between them.

mod dephasing;
mod inhomogeneous;
mod interrogation;
mod joint;
mod spontaneous;

pub use dephasing::{dephasing_gain, dephasing_noise, dephasing_xi2, ideal_optimum};
pub use inhomogeneous::{inhomogeneous_echo, inhomogeneous_gain};
pub use interrogation::{
    interrogation_sensitivity, ramsey_squeezing, InterrogationSensitivity, RamseySqueezing,
};
pub use joint::{joint_xi2, optimal_dephasing_ratio, optimize_gain, GainOptimum, DEFAULT_FLIP_BRANCH_RATIO};
pub use spontaneous::{
    spont_fg, spont_gain, spont_noise, spont_xi2, DampedOscillator, SpontFg,
};

use crate::cavity::DecoherenceRates;
use crate::{Error, Real, Result};

/// Exact assembly or the quoted leading-order expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    #[default]
    Exact,
    Approximate,
}

/// Evaluation route for the amplification slope under spontaneous emission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainRoute {
    /// Closed form of the balanced-rate Heisenberg hierarchy.
    #[default]
    Exact,
    /// The f̃ construction with its small-φ initial slope.
    FTilde,
    /// N(N−1)/2·χt₀·e^{−4γ_r t₀}e^{−3γ_z t₀/2}.
    Approximate,
}

/// Echo parameters: atom number, twisting strength, collective dephasing
/// Γ_z, single-atom rates and the twisting time t₀ (rates in 1/s, t₀ in s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoInput<T> {
    pub atoms: usize,
    pub chi: T,
    pub gamma_z: T,
    pub rates: DecoherenceRates<T>,
    pub t0: T,
}

impl<T: Real> EchoInput<T> {
    pub fn new(atoms: usize, chi: T, gamma_z: T, rates: DecoherenceRates<T>, t0: T) -> Result<Self> {
        let input = Self {
            atoms,
            chi,
            gamma_z,
            rates,
            t0,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        check_atoms(self.atoms)?;
        if !(self.t0 >= T::zero()) {
            return Err(Error::domain("twisting time must be non-negative"));
        }
        if !(self.gamma_z >= T::zero()) {
            return Err(Error::domain("collective dephasing must be non-negative"));
        }
        Ok(())
    }

    /// S = N/2.
    pub fn spin(&self) -> T {
        T::count(self.atoms) / T::lit(2.0)
    }
}

/// Noise, slope and the derived figures of merit of one echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoResult<T> {
    pub noise_var: T,
    pub gain_slope: T,
    pub amplification: T,
    pub xi2: T,
    pub phase_sensitivity: T,
}

impl<T: Real> EchoResult<T> {
    pub fn from_parts(atoms: usize, noise_var: T, gain_slope: T) -> Self {
        let n = T::count(atoms);
        let phase_sensitivity = if gain_slope == T::zero() {
            T::infinity()
        } else {
            noise_var.sqrt() / gain_slope.abs()
        };
        Self {
            noise_var,
            gain_slope,
            amplification: gain_slope / (n / T::lit(2.0)),
            xi2: n * phase_sensitivity * phase_sensitivity,
            phase_sensitivity,
        }
    }
}

/// Echo with a single decoherence channel: collective dephasing or
/// balanced single-atom rates. Both at once has no closed form here.
pub fn echo<T: Real>(input: &EchoInput<T>, route: Route) -> Result<EchoResult<T>> {
    input.validate()?;
    let single = input.rates.total > T::zero();
    if single && input.gamma_z > T::zero() {
        return Err(Error::Unsupported(
            "collective and single-atom decoherence together".into(),
        ));
    }
    let n = input.atoms;
    if single {
        let gain_route = match route {
            Route::Exact => GainRoute::Exact,
            Route::Approximate => GainRoute::Approximate,
        };
        let noise = spont_noise(n, input.chi, &input.rates, input.t0, route)?;
        let gain = spont_gain(n, input.chi, &input.rates, input.t0, gain_route)?;
        Ok(EchoResult::from_parts(n, noise, gain))
    } else {
        let noise = dephasing_noise(n, input.gamma_z, input.t0, route)?;
        let gain = dephasing_gain(n, input.chi, input.gamma_z, input.t0)?;
        Ok(EchoResult::from_parts(n, noise, gain))
    }
}

pub(crate) fn check_atoms(atoms: usize) -> Result<()> {
    if atoms < 2 {
        return Err(Error::domain("the echo needs at least two atoms"));
    }
    if atoms > i32::MAX as usize {
        return Err(Error::domain("atom number too large"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn result_relations() {
        let r = EchoResult::from_parts(10, 2.5f64, 20.0);
        assert!((r.xi2 - 10.0 * r.phase_sensitivity.powi(2)).abs() < 1e-15);
        assert!((r.amplification - 4.0).abs() < 1e-15);
        assert!(EchoResult::from_parts(10, 2.5f64, 0.0).xi2.is_infinite());
    }

    #[test]
    fn dispatch() {
        let rates = DecoherenceRates::balanced(0.01f64, 0.0).unwrap();
        let mixed = EchoInput::new(4, 1.0, 0.1, rates, 0.1).unwrap();
        assert!(matches!(echo(&mixed, Route::Exact), Err(Error::Unsupported(_))));
        let coll = EchoInput::new(4, 1.0, 0.1, DecoherenceRates::none(), 0.1).unwrap();
        let r = echo(&coll, Route::Exact).unwrap();
        assert!(r.noise_var >= 1.0 - 1e-12);
        assert!(EchoInput::new(1, 1.0, 0.0, DecoherenceRates::none(), 0.1).is_err());
        let single = EchoInput::new(4, 1.0f32, 0.0, DecoherenceRates::balanced(0.01, 0.0).unwrap(), 0.1).unwrap();
        assert!(echo(&single, Route::Exact).unwrap().xi2 > 0.0);
    }
}
