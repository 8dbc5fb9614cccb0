//! Effective spin-model constants of the dispersively coupled cavity:
//! steady-state field, effective detuning, twisting couplings χ_nm,
//! collective dephasing Γ_z, single-atom rates and cooperativity.
//!
//! All frequencies are angular (rad/s).

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::lattice::{CouplingProfile, LatticeConfig};
use crate::{Error, Real, Result};

/// Cavity and pump parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig<T> {
    pub coupling_up: T,
    pub coupling_down: T,
    pub detuning_up: T,
    pub detuning_down: T,
    pub cavity_detuning: T,
    pub linewidth: T,
    pub pump: Complex<T>,
}

impl<T: Real> CavityConfig<T> {
    pub fn new(
        coupling_up: T,
        coupling_down: T,
        detuning_up: T,
        detuning_down: T,
        cavity_detuning: T,
        linewidth: T,
        pump: Complex<T>,
    ) -> Result<Self> {
        let cfg = Self {
            coupling_up,
            coupling_down,
            detuning_up,
            detuning_down,
            cavity_detuning,
            linewidth,
            pump,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.linewidth > T::zero()) {
            return Err(Error::domain("cavity linewidth must be positive"));
        }
        self.check_detunings()
    }

    fn check_detunings(&self) -> Result<()> {
        if self.detuning_up == T::zero() || self.detuning_down == T::zero() {
            return Err(Error::domain("atomic detunings must be nonzero"));
        }
        Ok(())
    }

    /// Single-photon light shifts |𝒢⁰_σ|²/Δ_σ of the two spin states.
    pub fn light_shifts(&self) -> Result<(T, T)> {
        self.check_detunings()?;
        Ok((
            self.coupling_up * self.coupling_up / self.detuning_up,
            self.coupling_down * self.coupling_down / self.detuning_down,
        ))
    }

    /// η = ½(|𝒢⁰_↑|²/Δ_↑ − |𝒢⁰_↓|²/Δ_↓).
    pub fn differential_shift(&self) -> Result<T> {
        let (u, d) = self.light_shifts()?;
        Ok((u - d) / T::lit(2.0))
    }

    /// ½(|𝒢⁰_↑|²/Δ_↑ + |𝒢⁰_↓|²/Δ_↓), the per-atom cavity pull.
    pub fn common_shift(&self) -> Result<T> {
        let (u, d) = self.light_shifts()?;
        Ok((u + d) / T::lit(2.0))
    }
}

/// α = ε/(Δ̃_c + iκ/2).
pub fn steady_alpha<T: Real>(cfg: &CavityConfig<T>, effective_detuning: T) -> Result<Complex<T>> {
    let denom = Complex::new(effective_detuning, cfg.linewidth / T::lit(2.0));
    if denom.norm_sqr() == T::zero() {
        return Err(Error::domain("Δ̃_c and κ both vanish"));
    }
    Ok(cfg.pump / denom)
}

/// Δ̃_c = Δ_c − Σ_n N_n·common_shift·overlap(n,n).
pub fn effective_detuning<T: Real>(
    cfg: &CavityConfig<T>,
    occupancies: &[T],
    overlaps: &[T],
) -> Result<T> {
    if occupancies.len() != overlaps.len() {
        return Err(Error::domain("occupancy and overlap arrays differ in length"));
    }
    let pull = cfg.common_shift()?;
    let loaded: T = occupancies.iter().zip(overlaps).map(|(&n, &o)| n * o).sum();
    Ok(cfg.cavity_detuning - pull * loaded)
}

/// Photon-mediated one-axis-twisting constants.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistingParams<T: Real> {
    pub chi: T,
    pub gamma_z: T,
    /// d = Γ_z/χ = κ/Δ̃_c.
    pub ratio: T,
    pub site_matrix: Option<DMatrix<T>>,
    pub alpha: Complex<T>,
    pub effective_detuning: T,
}

/// χ_nm = η_nη_m|α|²Δ̃_c/(Δ̃_c²+κ²/4) and Γ_z = (κ/Δ̃_c)χ.
pub fn twisting_params<T: Real>(
    profile: &CouplingProfile<T>,
    alpha: Complex<T>,
    effective_detuning: T,
    kappa: T,
) -> Result<TwistingParams<T>> {
    if effective_detuning == T::zero() {
        return Err(Error::domain("effective cavity detuning must be nonzero"));
    }
    let lorentz = alpha.norm_sqr() * effective_detuning
        / (effective_detuning * effective_detuning + kappa * kappa / T::lit(4.0));
    let eta = profile.eta_mean;
    let chi = eta * eta * lorentz;
    let ratio = kappa / effective_detuning;
    let sites = &profile.site_values;
    let matrix = DMatrix::from_fn(sites.len(), sites.len(), |i, j| sites[i] * sites[j] * lorentz);
    Ok(TwistingParams {
        chi,
        gamma_z: ratio * chi,
        ratio,
        site_matrix: Some(matrix),
        alpha,
        effective_detuning,
    })
}

/// C′ = χ²/(Γ_zΓ).
pub fn cooperativity<T: Real>(chi: T, gamma_z: T, gamma: T) -> Result<T> {
    if !(gamma_z > T::zero()) || !(gamma > T::zero()) {
        return Err(Error::domain("Γ_z and Γ must be positive"));
    }
    Ok(chi * chi / (gamma_z * gamma))
}

/// Spontaneous scattering estimate Γ = γ|𝒢⁰|²|α|²/Δ² with unit prefactor.
pub fn scattering_rate<T: Real>(linewidth: T, coupling: T, alpha: Complex<T>, detuning: T) -> Result<T> {
    if detuning == T::zero() {
        return Err(Error::domain("atomic detuning must be nonzero"));
    }
    Ok(linewidth * coupling * coupling * alpha.norm_sqr() / (detuning * detuning))
}

/// Single-atom decoherence rates for the spontaneous-emission channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceRates<T> {
    pub gamma_plus: T,
    pub gamma_minus: T,
    pub gamma_z: T,
    /// Γ = (γ₊ + γ₋ + γ_z)/2.
    pub total: T,
    /// Mean flip rate (γ₊ + γ₋)/2.
    pub gamma_r: T,
    /// P_f = γ_r/Γ, zero when Γ = 0.
    pub flip_probability: T,
}

impl<T: Real> DecoherenceRates<T> {
    pub fn new(gamma_plus: T, gamma_minus: T, gamma_z: T) -> Result<Self> {
        for v in [gamma_plus, gamma_minus, gamma_z] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::domain("rates must be finite and non-negative"));
            }
        }
        let total = (gamma_plus + gamma_minus + gamma_z) / T::lit(2.0);
        let gamma_r = (gamma_plus + gamma_minus) / T::lit(2.0);
        let flip_probability = if total > T::zero() {
            gamma_r / total
        } else {
            T::zero()
        };
        Ok(Self {
            gamma_plus,
            gamma_minus,
            gamma_z,
            total,
            gamma_r,
            flip_probability,
        })
    }

    /// γ₊ = γ₋ = γ_r.
    pub fn balanced(gamma_r: T, gamma_z: T) -> Result<Self> {
        Self::new(gamma_r, gamma_r, gamma_z)
    }

    /// Balanced rates with γ_r = P_f·Γ and γ_z = 2(1 − P_f)Γ.
    pub fn from_total(total: T, flip_probability: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&flip_probability) {
            return Err(Error::domain("flip probability outside [0, 1]"));
        }
        let gamma_r = flip_probability * total;
        let mut r = Self::balanced(gamma_r, T::lit(2.0) * (total - gamma_r))?;
        r.flip_probability = flip_probability;
        Ok(r)
    }

    pub fn none() -> Self {
        Self {
            gamma_plus: T::zero(),
            gamma_minus: T::zero(),
            gamma_z: T::zero(),
            total: T::zero(),
            gamma_r: T::zero(),
            flip_probability: T::zero(),
        }
    }

    pub fn is_balanced(&self) -> bool {
        let scale = self.gamma_plus.abs().max(self.gamma_minus.abs());
        (self.gamma_plus - self.gamma_minus).abs() <= T::solver_tol() * scale
    }
}

/// One validity inequality of the adiabatic elimination. `margin` is the
/// ratio large side / small side; the inequality holds when it reaches
/// `required`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCheck<T> {
    pub inequality: &'static str,
    pub margin: T,
    pub required: T,
    pub satisfied: bool,
}

/// Ratio standing in for "≫" in the regime checks.
pub const DEFAULT_DOMINANCE: f64 = 10.0;

/// Evaluates the elimination hierarchy at the given operating point. Never
/// fails on violated inequalities, only reports them.
pub fn regime_check<T: Real>(
    cfg: &CavityConfig<T>,
    lattice: &LatticeConfig<T>,
    alpha: Complex<T>,
    effective_detuning: T,
    atoms: usize,
    dominance: T,
) -> Result<Vec<RegimeCheck<T>>> {
    let eta = cfg.differential_shift()?;
    let amp = alpha.norm();
    let gamma = lattice.species.linewidth;
    let ratio = |big: T, small: T| {
        if small == T::zero() {
            T::infinity()
        } else {
            big.abs() / small.abs()
        }
    };
    let entry = |inequality, margin: T, required: T| RegimeCheck {
        inequality,
        margin,
        required,
        satisfied: margin >= required,
    };
    Ok(vec![
        entry(
            "|Δ_↑| ≫ 𝒢⁰_↑|α|",
            ratio(cfg.detuning_up, cfg.coupling_up * amp),
            dominance,
        ),
        entry(
            "|Δ_↓| ≫ 𝒢⁰_↓|α|",
            ratio(cfg.detuning_down, cfg.coupling_down * amp),
            dominance,
        ),
        entry("|Δ_↑| ≫ γ", ratio(cfg.detuning_up, gamma), dominance),
        entry("|Δ_↓| ≫ γ", ratio(cfg.detuning_down, gamma), dominance),
        entry(
            "|Δ̃_c| ≫ η|α|√N",
            ratio(effective_detuning, eta * amp * T::count(atoms).sqrt()),
            dominance,
        ),
        entry("|Δ̃_c| ≫ κ", ratio(effective_detuning, cfg.linewidth), dominance),
        entry(
            "η|α|² < Mga_l/ħ",
            ratio(lattice.bloch_frequency(), eta * amp * amp),
            T::one(),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::RB87;
    use crate::lattice::eta_profile;

    fn cavity() -> CavityConfig<f64> {
        CavityConfig::new(
            2e6,
            2e6,
            1e9,
            -1e9,
            5e6,
            1e5,
            Complex::new(3e5, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn steady_field() {
        let mut c = cavity();
        let a = steady_alpha(&c, 4e6).unwrap();
        let expect = 9e10 / (16e12 + 0.25e10);
        assert!((a.norm_sqr() - expect).abs() / expect < 1e-13);
        c.pump = Complex::new(0.0, 0.0);
        assert_eq!(steady_alpha(&c, 4e6).unwrap().norm(), 0.0);
        let mut c = cavity();
        c.linewidth = 1e-12;
        let a = steady_alpha(&c, 4e6).unwrap();
        assert!(a.im.abs() < 1e-17 && (a.re - 3e5 / 4e6).abs() < 1e-15);
    }

    #[test]
    fn shifts_and_validation() {
        let c = cavity();
        assert!((c.differential_shift().unwrap() - 4e3).abs() < 1e-9);
        assert!(c.common_shift().unwrap().abs() < 1e-9);
        let mut same = c.clone();
        same.detuning_down = 1e9;
        assert_eq!(same.differential_shift().unwrap(), 0.0);
        same.detuning_up = 0.0;
        assert!(same.differential_shift().is_err());
        let mut bad = cavity();
        bad.linewidth = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn effective_detuning_matches_loop() {
        let mut c = cavity();
        c.detuning_down = 2e9;
        assert_eq!(effective_detuning(&c, &[], &[]).unwrap(), c.cavity_detuning);
        let occ = [1.0, 2.0, 0.0, 3.0];
        let ov = [0.4, 0.5, 0.6, 0.45];
        let mut expect = c.cavity_detuning;
        for i in 0..4 {
            expect -= occ[i] / 2.0
                * (c.coupling_up.powi(2) / c.detuning_up + c.coupling_down.powi(2) / c.detuning_down)
                * ov[i];
        }
        assert!((effective_detuning(&c, &occ, &ov).unwrap() - expect).abs() < 1e-6);
        assert!(effective_detuning(&c, &occ, &ov[..2]).is_err());
    }

    #[test]
    fn twisting_relations() {
        let lat = LatticeConfig::<f64>::preset(&RB87, 4.0);
        let c = cavity();
        let prof = eta_profile(&lat, &c, 0..6).unwrap();
        let a = steady_alpha(&c, 5e6).unwrap();
        let tp = twisting_params(&prof, a, 5e6, c.linewidth).unwrap();
        assert!((tp.gamma_z / tp.chi - c.linewidth / 5e6).abs() < 1e-15);
        let m = tp.site_matrix.as_ref().unwrap();
        assert_eq!(m, &m.transpose());
        let sv = m.clone().svd(false, false).singular_values;
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(s[1] < s[0] * 1e-12);
        let flipped = twisting_params(&prof, a, -5e6, c.linewidth).unwrap();
        assert!((flipped.chi + tp.chi).abs() < 1e-12 * tp.chi.abs());
        assert!(flipped.gamma_z > 0.0 && (flipped.gamma_z - tp.gamma_z).abs() < 1e-9 * tp.gamma_z);
        let lossless = twisting_params(&prof, a, 5e6, 0.0).unwrap();
        assert_eq!(lossless.gamma_z, 0.0);
        let eta = prof.eta_mean;
        assert!((lossless.chi - eta * eta * a.norm_sqr() / 5e6).abs() < 1e-12 * lossless.chi);
        assert!(twisting_params(&prof, a, 0.0, 1.0).is_err());
    }

    #[test]
    fn cooperativity_values() {
        assert!((cooperativity(1.0f64, 0.1, 5.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(cooperativity(1.0f64, 0.0, 5.0).is_err());
        // χ, Γ_z and Γ are each linear in |α|².
        let lat = LatticeConfig::<f64>::preset(&RB87, 4.0);
        let c = cavity();
        let prof = eta_profile(&lat, &c, 0..2).unwrap();
        let a1 = Complex::new(3.0, 0.0);
        let a2 = a1 * 2f64.sqrt();
        let t1 = twisting_params(&prof, a1, 5e6, 1e5).unwrap();
        let t2 = twisting_params(&prof, a2, 5e6, 1e5).unwrap();
        let g1 = scattering_rate(1e7, 2e6, a1, 1e9).unwrap();
        let g2 = scattering_rate(1e7, 2e6, a2, 1e9).unwrap();
        for (x, y) in [(t1.chi, t2.chi), (t1.gamma_z, t2.gamma_z), (g1, g2)] {
            assert!((y / x - 2.0).abs() < 1e-12);
        }
        // C′(Δ̃)(1 + κ²/4Δ̃²) is independent of Δ̃ at fixed Γ.
        let kappa = 1e5;
        let reference: Vec<f64> = [1e5, 3e5, 1e6, 7e6]
            .iter()
            .map(|&d| {
                let t = twisting_params(&prof, a1, d, kappa).unwrap();
                cooperativity(t.chi, t.gamma_z, g1).unwrap() * (1.0 + kappa * kappa / (4.0 * d * d))
            })
            .collect();
        for r in &reference {
            assert!((r / reference[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decoherence_rates() {
        let r = DecoherenceRates::<f64>::from_total(2.0, 0.5).unwrap();
        assert_eq!((r.gamma_plus, r.gamma_minus, r.gamma_r), (1.0, 1.0, 1.0));
        assert!((r.total - 2.0).abs() < 1e-15 && (r.gamma_z - 2.0).abs() < 1e-15);
        assert!(r.is_balanced());
        assert!(!DecoherenceRates::<f64>::new(1.0, 2.0, 0.0).unwrap().is_balanced());
        assert!(DecoherenceRates::<f64>::new(-1.0, 0.0, 0.0).is_err());
        assert!(DecoherenceRates::<f64>::from_total(1.0, 1.5).is_err());
        let r32 = DecoherenceRates::<f32>::from_total(1.0, 0.25).unwrap();
        assert!((r32.gamma_r - 0.25).abs() < 1e-7);
    }

    #[test]
    fn regime_report() {
        let lat = LatticeConfig::<f64>::preset(&RB87, 6.0);
        let mut c = cavity();
        c.pump = Complex::new(0.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let checks = regime_check(&c, &lat, zero, 5e6, 1000, DEFAULT_DOMINANCE).unwrap();
        assert_eq!(checks.len(), 7);
        let light = [0, 1, 4, 6];
        for i in light {
            assert!(checks[i].satisfied && checks[i].margin.is_infinite());
        }
        // η|α|² = 0.2 Mga_l/ħ.
        let eta = c.differential_shift().unwrap();
        let amp2 = 0.2 * lat.bloch_frequency() / eta;
        let a = Complex::new(amp2.sqrt(), 0.0);
        let stark = &regime_check(&c, &lat, a, 5e6, 1000, DEFAULT_DOMINANCE).unwrap()[6];
        assert!(stark.satisfied && (stark.margin - 5.0).abs() < 1e-9);
        let big = Complex::new(1e4, 0.0);
        let bad = regime_check(&c, &lat, big, 5e6, 1000, DEFAULT_DOMINANCE).unwrap();
        assert!(!bad[6].satisfied && bad[6].margin < 1.0);
    }
}
