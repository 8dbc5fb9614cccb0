//! Radial-mode corrections from the Gaussian lattice and cavity beams, and
//! their spread over a thermal radial distribution.
//!
//! Radial levels are E_{n_x,n_y} = c·ħω_r(n_x + n_y + 1) with c = 1/2 for
//! [`RadialSpectrum::Halved`] and c = 1 for [`RadialSpectrum::Standard`]; the
//! Boltzmann weights use the same levels.

use crate::constants::{BOLTZMANN, HBAR};
use crate::lattice::{tunneling, LatticeConfig, WsLattice};
use crate::numerics::{band_energy_dv0, bessel_j, hyp2f1_neg_int_leading_conditioned, NeumaierSum};
use crate::{Error, Real, Result};

/// Default largest radial quantum number per axis.
pub const MODE_CAP: usize = 200_000;
/// Modes with Boltzmann weight below this fraction of the ground mode are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-12;
/// Largest tolerated cancellation error of the hypergeometric overlap.
pub const OVERLAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeColor {
    Red,
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialSpectrum {
    /// ħω_r(n_x + n_y + 1)/2.
    #[default]
    Halved,
    /// ħω_r(n_x + n_y + 1).
    Standard,
}

impl RadialSpectrum {
    fn factor<T: Real>(self) -> T {
        match self {
            Self::Halved => T::lit(0.5),
            Self::Standard => T::one(),
        }
    }
}

/// Temperature (K), external radial trap ω_r1 (rad/s), beam waists (m) and
/// the lattice colour. An infinite waist switches the corresponding
/// correction off.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalConfig<T> {
    pub temperature: T,
    pub radial_trap: T,
    pub lattice_waist: T,
    pub cavity_waist: T,
    pub color: LatticeColor,
    pub spectrum: RadialSpectrum,
    pub mode_cap: usize,
}

impl<T: Real> ThermalConfig<T> {
    pub fn new(temperature: T, radial_trap: T, lattice_waist: T, cavity_waist: T, color: LatticeColor) -> Result<Self> {
        if !(temperature >= T::zero()) || !temperature.is_finite() {
            return Err(Error::domain("temperature must be finite and non-negative"));
        }
        if !(radial_trap >= T::zero()) || !radial_trap.is_finite() {
            return Err(Error::domain("radial trap frequency must be finite and non-negative"));
        }
        if !(lattice_waist > T::zero()) || !(cavity_waist > T::zero()) {
            return Err(Error::domain("beam waists must be positive"));
        }
        Ok(Self {
            temperature,
            radial_trap,
            lattice_waist,
            cavity_waist,
            color,
            spectrum: RadialSpectrum::default(),
            mode_cap: MODE_CAP,
        })
    }

    pub fn with_spectrum(self, spectrum: RadialSpectrum) -> Self {
        Self { spectrum, ..self }
    }

    pub fn with_mode_cap(self, mode_cap: usize) -> Self {
        Self { mode_cap, ..self }
    }

    /// Chooses ω_r1 so that the total radial frequency equals `omega_r`.
    pub fn with_total_radial(self, lattice: &LatticeConfig<T>, omega_r: T) -> Result<Self> {
        let trap = match self.color {
            LatticeColor::Blue => omega_r,
            LatticeColor::Red => {
                let r0 = self.lattice_radial(lattice);
                if omega_r < r0 {
                    return Err(Error::domain(format!(
                        "total radial frequency {omega_r} below the lattice contribution {r0}"
                    )));
                }
                (omega_r * omega_r - r0 * r0).sqrt()
            }
        };
        Self::new(self.temperature, trap, self.lattice_waist, self.cavity_waist, self.color)
            .map(|c| c.with_spectrum(self.spectrum).with_mode_cap(self.mode_cap))
    }

    /// ω_r0 = √(4V₀/Mw_l²).
    pub fn lattice_radial(&self, lattice: &LatticeConfig<T>) -> T {
        if self.lattice_waist.is_infinite() {
            return T::zero();
        }
        let v0 = lattice.depth * lattice.recoil_energy();
        (T::lit(4.0) * v0 / (lattice.species.mass * self.lattice_waist * self.lattice_waist)).sqrt()
    }

    /// ω_r: √(ω_r0² + ω_r1²) for a red lattice, ω_r1 for a blue one.
    pub fn total_radial(&self, lattice: &LatticeConfig<T>) -> Result<T> {
        let w = match self.color {
            LatticeColor::Red => self.lattice_radial(lattice).hypot(self.radial_trap),
            LatticeColor::Blue => self.radial_trap,
        };
        if !(w > T::zero()) {
            return Err(Error::domain("radial confinement vanishes"));
        }
        Ok(w)
    }

    /// E_{n_x,n_y}/E_R.
    pub fn mode_energy(&self, lattice: &LatticeConfig<T>, nx: usize, ny: usize) -> Result<T> {
        let quantum = T::lit(HBAR) * self.total_radial(lattice)? / lattice.recoil_energy();
        Ok(self.spectrum.factor::<T>() * quantum * T::count(nx + ny + 1))
    }

    /// α = √(1/2 + ħ/(Mω_r w_c²)).
    pub fn alpha(&self, lattice: &LatticeConfig<T>) -> Result<T> {
        radial_alpha(self.total_radial(lattice)?, self.cavity_waist, lattice.species.mass)
    }

    /// Boltzmann ratio q between neighbouring levels of one axis.
    pub fn level_ratio(&self, lattice: &LatticeConfig<T>) -> Result<T> {
        if self.temperature == T::zero() {
            return Ok(T::zero());
        }
        let step = self.spectrum.factor::<T>() * T::lit(HBAR) * self.total_radial(lattice)?;
        Ok((-step / (T::lit(BOLTZMANN) * self.temperature)).exp())
    }

    /// Largest n_x + n_y kept by the weight floor.
    pub fn cutoff(&self, lattice: &LatticeConfig<T>) -> Result<usize> {
        let q = self.level_ratio(lattice)?;
        if q == T::zero() {
            return Ok(0);
        }
        let n = (T::lit(WEIGHT_FLOOR).ln() / q.ln()).ceil();
        if !(n <= T::count(self.mode_cap)) {
            return Err(Error::domain(format!(
                "radial distribution needs a cutoff of {n} quanta per axis, above the cap {}",
                self.mode_cap
            )));
        }
        Ok(n.to_usize().unwrap_or(0))
    }
}

pub fn radial_alpha<T: Real>(omega_r: T, cavity_waist: T, mass: T) -> Result<T> {
    if !(omega_r > T::zero()) || !(cavity_waist > T::zero()) || !(mass > T::zero()) {
        return Err(Error::domain("radial frequency, waist and mass must be positive"));
    }
    let extra = if cavity_waist.is_infinite() {
        T::zero()
    } else {
        T::lit(HBAR) / (mass * omega_r * cavity_waist * cavity_waist)
    };
    Ok((T::lit(0.5) + extra).sqrt())
}

/// α² clamped to 1/2 when it undershoots by rounding only.
fn checked_alpha_sqr<T: Real>(alpha: T) -> Result<T> {
    let a2 = alpha * alpha;
    let half = T::lit(0.5);
    if !(a2 >= half * (T::one() - T::lit(8.0) * T::epsilon())) || !alpha.is_finite() {
        return Err(Error::domain("α must be at least 1/√2"));
    }
    Ok(a2.max(half))
}

/// h(m) = ∫e^{−2r²/w_c²}|φ_m|² from the terminating hypergeometric series.
///
/// Normalised by its leading term the series becomes h(m) = L_m(w)/(√2α)
/// with w = (2α² − 1)/α². The sum alternates, so a numeric error is returned
/// once cancellation exceeds [`OVERLAP_TOL`].
pub fn radial_overlap<T: Real>(m: usize, alpha: T) -> Result<T> {
    let a2 = checked_alpha_sqr(alpha)?;
    let w = (T::lit(2.0) * a2 - T::one()) / a2;
    let sum = hyp2f1_neg_int_leading_conditioned(m as u64, w)?;
    let err = sum.relative_error();
    if !(err <= T::lit(OVERLAP_TOL)) {
        return Err(Error::numeric(
            format!("radial overlap h({m}) lost precision to cancellation"),
            err.lossy_f64(),
        ));
    }
    Ok(sum.value / (T::SQRT_2() * alpha))
}

/// h(0..=m_max) from the Legendre form h(m) = ρ^m P_m(z)/(√2α),
/// z = 1/√(1 − λ²), ρ = √((1 − λ)/(1 + λ)), λ = 2α² − 1. The scaled
/// recurrence (n+1)p_{n+1} = (2n+1)p_n/(2α²) − n(1 − α²)p_{n−1}/α² is stable
/// at any m.
pub fn radial_overlaps<T: Real>(m_max: usize, alpha: T) -> Result<Vec<T>> {
    let a2 = checked_alpha_sqr(alpha)?;
    let a = T::one() / (T::lit(2.0) * a2);
    let b = (T::one() - a2) / a2;
    let mut p = Vec::with_capacity(m_max + 1);
    p.push(T::one());
    if m_max > 0 {
        p.push(a);
    }
    for n in 1..m_max {
        let nf = T::count(n);
        let next = ((T::lit(2.0) * nf + T::one()) * a * p[n] - nf * b * p[n - 1]) / (nf + T::one());
        p.push(next);
    }
    let scale = T::one() / (T::SQRT_2() * alpha);
    Ok(p.into_iter().map(|x| x * scale).collect())
}

/// η̃_n/η_n = h(n_x)h(n_y).
pub fn eta_corrected<T: Real>(nx: usize, ny: usize, omega_r: T, cavity_waist: T, mass: T) -> Result<T> {
    let alpha = radial_alpha(omega_r, cavity_waist, mass)?;
    Ok(radial_overlap(nx, alpha)? * radial_overlap(ny, alpha)?)
}

/// J̃₀ = J₀ + slope·E_{n_x,n_y}, both in E_R.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingCorrection<T> {
    pub bare: T,
    pub slope: T,
}

impl<T: Real> TunnelingCorrection<T> {
    /// slope = (1/8)(ω_r0²/ω_r²)[∂f/∂v₀(0) − ∂f/∂v₀(±1)].
    pub fn new(lattice: &LatticeConfig<T>, th: &ThermalConfig<T>) -> Result<Self> {
        let r0 = th.lattice_radial(lattice);
        let r = th.total_radial(lattice)?;
        let v0 = lattice.depth;
        let df = band_energy_dv0(T::zero(), v0)? - band_energy_dv0(T::one(), v0)?;
        Ok(Self {
            bare: tunneling(v0, 1)?,
            slope: r0 * r0 / (r * r) * df / T::lit(8.0),
        })
    }

    pub fn at(&self, energy: T) -> T {
        self.bare + self.slope * energy
    }
}

pub fn j0_corrected<T: Real>(nx: usize, ny: usize, lattice: &LatticeConfig<T>, th: &ThermalConfig<T>) -> Result<T> {
    let corr = TunnelingCorrection::new(lattice, th)?;
    Ok(corr.at(th.mode_energy(lattice, nx, ny)?))
}

/// Relative standard deviations over the thermal radial distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpreads<T> {
    /// σ_J/J of J̃₀.
    pub tunneling: T,
    /// σ_η/η of h(n_x)h(n_y).
    pub stark_shift: T,
    /// σ_χ/χ of the per-mode interaction strength.
    pub interaction: T,
    /// Largest n_x + n_y included.
    pub cutoff: usize,
}

/// Boltzmann-weighted spreads of J̃₀, of η̃/η and of χ̃/χ.
///
/// The per-mode interaction strength is χ̃/χ = (h(n_x)h(n_y))²·G(J̃₀) with
/// G = (1 + 𝒞²J₀(X̃)²/2)/(1 + 𝒞²J₀(X)²/2), the site average of
/// [1 + 𝒞J₀(X̃)cos(nφ)]² relative to its uncorrected value, and
/// X̃ = X·J̃₀/J₀. Each spread is divided by the mean of its quantity.
pub fn thermal_spreads<T: Real>(lattice: &LatticeConfig<T>, th: &ThermalConfig<T>) -> Result<ThermalSpreads<T>> {
    let cutoff = th.cutoff(lattice)?;
    let q = th.level_ratio(lattice)?;
    let corr = TunnelingCorrection::new(lattice, th)?;
    let ws = WsLattice::new(lattice)?;
    let h = radial_overlaps(cutoff, th.alpha(lattice)?)?;
    let c2 = ws.contrast * ws.contrast / T::lit(2.0);
    let reference = T::one() + c2 * bessel_j(0, ws.bessel_argument())?.powi(2);
    let shell: Vec<(T, T, T)> = (0..=cutoff)
        .map(|s| {
            let weight = if s == 0 { T::one() } else { q.powi(s as i32) };
            let j = corr.at(th.mode_energy(lattice, s, 0)?);
            let x = ws.bessel_argument() * j / corr.bare;
            let g = (T::one() + c2 * bessel_j(0, x)?.powi(2)) / reference;
            Ok((weight, j, g))
        })
        .collect::<Result<_>>()?;
    let mut z = NeumaierSum::new();
    let mut mean = [NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new()];
    for (s, &(w, j, g)) in shell.iter().enumerate() {
        let mut eta = NeumaierSum::new();
        let mut chi = NeumaierSum::new();
        for nx in 0..=s {
            let hh = h[nx] * h[s - nx];
            eta.add(hh);
            chi.add(hh * hh);
        }
        let count = T::count(s + 1);
        z.add(w * count);
        mean[0].add(w * count * j);
        mean[1].add(w * eta.total());
        mean[2].add(w * g * chi.total());
    }
    let z = z.total();
    let mu = mean.map(|m| m.total() / z);
    let mut var = [NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new()];
    for (s, &(w, j, g)) in shell.iter().enumerate() {
        let mut eta = NeumaierSum::new();
        let mut chi = NeumaierSum::new();
        for nx in 0..=s {
            let hh = h[nx] * h[s - nx];
            eta.add((hh - mu[1]).powi(2));
            chi.add((g * hh * hh - mu[2]).powi(2));
        }
        var[0].add(w * T::count(s + 1) * (j - mu[0]).powi(2));
        var[1].add(w * eta.total());
        var[2].add(w * chi.total());
    }
    let rel = |k: usize| (var[k].total() / z).sqrt() / mu[k].abs();
    Ok(ThermalSpreads {
        tunneling: rel(0),
        stark_shift: rel(1),
        interaction: rel(2),
        cutoff,
    })
}
