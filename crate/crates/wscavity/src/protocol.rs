//! Interferometer bookkeeping and end-to-end gravimetry sensitivity.
//!
//! Sign convention: φ = (E_↑ − E_↓)τ/ħ in the frame of the Raman and
//! microwave drives, so with both at nominal resonance φ > 0 when g is above
//! its nominal value. The ↑ component sits m_R·r sites above the ↓ component
//! during the free evolution; site n is centred at z = n·a_l.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::constants::HBAR;
use crate::echo::{optimize_gain, Route};
use crate::lattice::{LatticeConfig, WannierFunction, WsLattice};
use crate::numerics::NeumaierSum;
use crate::{Error, Result};

/// Transfer and timing parameters. Frequencies in rad/s, times in s.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    /// r, sites moved per compound pulse.
    pub transfer_sites: u32,
    /// m_R, compound pulses before the free evolution.
    pub pulse_pairs: u32,
    /// τ.
    pub interrogation: f64,
    /// T.
    pub averaging: f64,
    /// γ̃_z during the interrogation.
    pub interrogation_dephasing: f64,
    pub raman_frequency: f64,
    pub microwave_frequency: f64,
}

impl ProtocolParams {
    /// Drives on resonance for the nominal gravity of `lattice`, T = 1 s and
    /// no interrogation dephasing.
    pub fn new(lattice: &LatticeConfig<f64>, transfer_sites: u32, pulse_pairs: u32, interrogation: f64) -> Result<Self> {
        let p = Self {
            transfer_sites,
            pulse_pairs,
            interrogation,
            averaging: 1.0,
            interrogation_dephasing: 0.0,
            raman_frequency: lattice.bloch_frequency() * f64::from(transfer_sites),
            microwave_frequency: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.transfer_sites == 0 {
            return Err(Error::domain("transfer distance r must be at least one site"));
        }
        for (name, v) in [("interrogation time", self.interrogation), ("averaging time", self.averaging)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        if !(self.interrogation_dephasing >= 0.0) {
            return Err(Error::domain("interrogation dephasing must be non-negative"));
        }
        Ok(())
    }

    /// 2m_R·r, the ↑/↓ separation in sites.
    pub fn separation_sites(&self) -> i64 {
        2 * i64::from(self.pulse_pairs) * i64::from(self.transfer_sites)
    }

    /// ω_g = 2Mga_l·r·m_R/ħ at the nominal gravity of `lattice`.
    pub fn gravity_frequency(&self, lattice: &LatticeConfig<f64>) -> f64 {
        lattice.bloch_frequency() * self.separation_sites() as f64
    }

    /// φ_g = ω_gτ.
    pub fn phase_scale(&self, lattice: &LatticeConfig<f64>) -> f64 {
        self.gravity_frequency(lattice) * self.interrogation
    }
}

/// Phase accumulated during the free evolution at gravity `g`.
///
/// With `include_clock_terms` the drive frequencies enter as
/// φ = (Mga_l r/ħ − (ω_R − ω_MW))·2m_Rτ; without, the drives are taken on
/// resonance for the nominal gravity and φ = ω_gτ(g − g₀)/g₀.
pub fn accumulated_phase(params: &ProtocolParams, lattice: &LatticeConfig<f64>, g: f64, include_clock_terms: bool) -> f64 {
    let g0 = lattice.gravity;
    if include_clock_terms {
        let bloch = lattice.bloch_frequency() * g / g0 * f64::from(params.transfer_sites);
        let detuning = bloch - (params.raman_frequency - params.microwave_frequency);
        detuning * 2.0 * f64::from(params.pulse_pairs) * params.interrogation
    } else {
        params.phase_scale(lattice) * (g - g0) / g0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Pulse alphabet of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse {
    /// ℛ: |↑_n⟩ → |↑_{n+r}⟩, |↓_n⟩ → |↓_{n−r}⟩.
    Transfer,
    /// ℛ†.
    TransferInverse,
    /// R_z^φ = e^{−iφS^z}.
    PhaseZ(f64),
    /// R̃_x^θ = e^{−iθS^x}, carrier drive.
    CarrierX(f64),
    /// R̃_y^θ = e^{−iθS^y}, carrier drive.
    CarrierY(f64),
}

impl Pulse {
    pub fn inverse(self) -> Self {
        match self {
            Self::Transfer => Self::TransferInverse,
            Self::TransferInverse => Self::Transfer,
            Self::PhaseZ(a) => Self::PhaseZ(-a),
            Self::CarrierX(a) => Self::CarrierX(-a),
            Self::CarrierY(a) => Self::CarrierY(-a),
        }
    }
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Transfer => write!(f, "R"),
            Self::TransferInverse => write!(f, "Rdag"),
            Self::PhaseZ(a) => write!(f, "Rz:{a}"),
            Self::CarrierX(a) => write!(f, "Rx:{a}"),
            Self::CarrierY(a) => write!(f, "Ry:{a}"),
        }
    }
}

/// Parses `R`, `Rdag`, `Rz:<angle>`, `Rx:<angle>` and `Ry:<angle>`.
impl FromStr for Pulse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let angle = |a: &str| {
            a.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::domain(format!("bad pulse angle in {s:?}")))
        };
        match s.split_once(':') {
            None if s == "R" => Ok(Self::Transfer),
            None if s == "Rdag" => Ok(Self::TransferInverse),
            Some(("Rz", a)) => angle(a).map(Self::PhaseZ),
            Some(("Rx", a)) => angle(a).map(Self::CarrierX),
            Some(("Ry", a)) => angle(a).map(Self::CarrierY),
            _ => Err(Error::domain(format!("unknown pulse {s:?}"))),
        }
    }
}

/// R̃_x^{−π/2}(ℛ†)^{m_R} R_z^φ ℛ^{m_R} R̃_x^{π/2}, in application order.
pub fn interferometer_sequence(pulse_pairs: u32, phi: f64) -> Vec<Pulse> {
    let half = std::f64::consts::FRAC_PI_2;
    let mut seq = vec![Pulse::CarrierX(half)];
    seq.extend(std::iter::repeat(Pulse::Transfer).take(pulse_pairs as usize));
    seq.push(Pulse::PhaseZ(phi));
    seq.extend(std::iter::repeat(Pulse::TransferInverse).take(pulse_pairs as usize));
    seq.push(Pulse::CarrierX(-half));
    seq
}

type Branches = BTreeMap<(Spin, i64), Complex64>;

/// Per-atom amplitudes over (spin, site) labels and the pulses applied so far.
/// π pulses are exact; amplitudes below 1e-15 are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinSiteLedger {
    transfer_sites: i64,
    atoms: Vec<Branches>,
    history: Vec<Pulse>,
}

const DROP: f64 = 1e-15;

impl SpinSiteLedger {
    pub fn new(transfer_sites: u32, atoms: &[(Spin, i64)]) -> Result<Self> {
        if transfer_sites == 0 {
            return Err(Error::domain("transfer distance r must be at least one site"));
        }
        Ok(Self {
            transfer_sites: i64::from(transfer_sites),
            atoms: atoms
                .iter()
                .map(|&label| BTreeMap::from([(label, Complex64::new(1.0, 0.0))]))
                .collect(),
            history: Vec::new(),
        })
    }

    pub fn atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn history(&self) -> &[Pulse] {
        &self.history
    }

    /// Nonzero components of one atom.
    pub fn components(&self, atom: usize) -> Vec<((Spin, i64), Complex64)> {
        self.atoms.get(atom).map(|b| b.iter().map(|(k, v)| (*k, *v)).collect()).unwrap_or_default()
    }

    /// Site of ↑ minus site of ↓ when each spin occupies a single site.
    pub fn spin_separation(&self, atom: usize) -> Option<i64> {
        let b = self.atoms.get(atom)?;
        let sites = |spin: Spin| {
            let mut it = b.keys().filter(move |k| k.0 == spin).map(|k| k.1);
            let first = it.next()?;
            it.all(|s| s == first).then_some(first)
        };
        Some(sites(Spin::Up)? - sites(Spin::Down)?)
    }

    pub fn apply(&mut self, pulse: Pulse) {
        let r = self.transfer_sites;
        for b in &mut self.atoms {
            *b = match pulse {
                Pulse::Transfer | Pulse::TransferInverse => {
                    let dir = if pulse == Pulse::Transfer { 1 } else { -1 };
                    b.iter()
                        .map(|(&(spin, n), &a)| {
                            let step = if spin == Spin::Up { dir * r } else { -dir * r };
                            ((spin, n + step), a)
                        })
                        .collect()
                }
                Pulse::PhaseZ(phi) => {
                    let up = Complex64::from_polar(1.0, -phi / 2.0);
                    b.iter()
                        .map(|(&k, &a)| (k, if k.0 == Spin::Up { a * up } else { a * up.conj() }))
                        .collect()
                }
                Pulse::CarrierX(theta) | Pulse::CarrierY(theta) => {
                    let (s, c) = (theta / 2.0).sin_cos();
                    // e^{−iθσ/2} on each site's (↑, ↓) spinor.
                    let (off_ud, off_du) = match pulse {
                        Pulse::CarrierX(_) => (Complex64::new(0.0, -s), Complex64::new(0.0, -s)),
                        _ => (Complex64::new(-s, 0.0), Complex64::new(s, 0.0)),
                    };
                    let mut out = Branches::new();
                    for (&(spin, n), &a) in b.iter() {
                        let (stay, flip, other) = match spin {
                            Spin::Up => (c, off_du, Spin::Down),
                            Spin::Down => (c, off_ud, Spin::Up),
                        };
                        *out.entry((spin, n)).or_default() += a * stay;
                        *out.entry((other, n)).or_default() += a * flip;
                    }
                    out
                }
            };
            b.retain(|_, a| a.norm() > DROP);
        }
        self.history.push(pulse);
    }

    pub fn apply_sequence(&mut self, pulses: &[Pulse]) {
        for &p in pulses {
            self.apply(p);
        }
    }

    /// Applies the inverse of every recorded pulse in reverse order.
    pub fn undo_all(&mut self) {
        let rev: Vec<Pulse> = self.history.iter().rev().map(|p| p.inverse()).collect();
        self.apply_sequence(&rev);
    }

    /// Largest amplitude difference to another ledger over all labels.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.atoms.len() != other.atoms.len() {
            return f64::INFINITY;
        }
        let zero = Complex64::new(0.0, 0.0);
        self.atoms
            .iter()
            .zip(&other.atoms)
            .flat_map(|(a, b)| {
                a.keys()
                    .chain(b.keys())
                    .map(|k| (a.get(k).copied().unwrap_or(zero) - b.get(k).copied().unwrap_or(zero)).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }
}

/// Parses a pulse list separated by whitespace or commas.
pub fn parse_pulses(text: &str) -> Result<Vec<Pulse>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

/// Short-range potential 𝒰(z) in J against z in m.
pub enum ShortRangePotential {
    /// Linear interpolation between strictly increasing nodes.
    Table { z: Vec<f64>, u: Vec<f64> },
    /// Any evaluator; must be finite wherever it is called.
    Function(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ShortRangePotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Table { z, .. } => write!(f, "Table({} nodes)", z.len()),
            Self::Function(_) => write!(f, "Function"),
        }
    }
}

impl ShortRangePotential {
    pub fn table(z: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if z.len() != u.len() || z.len() < 2 {
            return Err(Error::domain("potential table needs at least two (z, U) rows"));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) || z.iter().chain(&u).any(|x| !x.is_finite()) {
            return Err(Error::domain("potential table must be finite with increasing z"));
        }
        Ok(Self::Table { z, u })
    }

    /// Two whitespace- or comma-separated columns (z in m, 𝒰 in J); blank
    /// lines and `#` comments are skipped.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut z = Vec::new();
        let mut u = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::domain(format!("potential table line {}: bad number {s:?}", i + 1)))
            };
            match cols.as_slice() {
                [a, b] => {
                    z.push(parse(a)?);
                    u.push(parse(b)?);
                }
                _ => return Err(Error::domain(format!("potential table line {}: expected two columns", i + 1))),
            }
        }
        Self::table(z, u)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::Table { z, u } => {
                if !(x >= z[0] && x <= z[z.len() - 1]) {
                    return Err(Error::domain(format!("potential undefined at z = {x} m")));
                }
                let k = z.partition_point(|&v| v <= x).clamp(1, z.len() - 1);
                let t = (x - z[k - 1]) / (z[k] - z[k - 1]);
                Ok(u[k - 1] + t * (u[k] - u[k - 1]))
            }
            Self::Function(f) => {
                let v = f(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::domain(format!("potential not finite at z = {x} m")))
                }
            }
        }
    }
}

/// Points per lattice site and Wannier half-width (sites) of the smearing grid.
const SMEAR_POINTS: usize = 32;
const SMEAR_HALF_WIDTH: usize = 10;
/// WS amplitudes below this are skipped.
const SMEAR_AMPLITUDE_FLOOR: f64 = 1e-16;

/// 𝒰_n = ∫𝒰(z)|φ_n(z)|²dz over normalised Wannier-Stark orbitals.
#[derive(Debug, Clone)]
pub struct PotentialMoments {
    ws: WsLattice<f64>,
    wannier: Vec<f64>,
    spacing: f64,
}

impl PotentialMoments {
    pub fn new(lattice: &LatticeConfig<f64>) -> Result<Self> {
        let w = WannierFunction::new(lattice.depth)?;
        Ok(Self {
            ws: WsLattice::new(lattice)?,
            wannier: w.sample(SMEAR_HALF_WIDTH, SMEAR_POINTS),
            spacing: lattice.lattice_spacing(),
        })
    }

    pub fn moment(&self, potential: &ShortRangePotential, n: i64) -> Result<f64> {
        let state = self.ws.state(n)?;
        let p = SMEAR_POINTS as i64;
        let half = (SMEAR_HALF_WIDTH as i64) * p;
        let lo = (n - state.tail()) * p - half;
        let hi = (n + state.tail()) * p + half;
        let mut phi = vec![0.0; (hi - lo + 1) as usize];
        for (m, c) in state.coefficients() {
            if c.abs() < SMEAR_AMPLITUDE_FLOOR {
                continue;
            }
            let start = (m * p - half - lo) as usize;
            for (k, w) in self.wannier.iter().enumerate() {
                phi[start + k] += c * w;
            }
        }
        let mut num = NeumaierSum::new();
        let mut norm = NeumaierSum::new();
        for (i, f) in phi.iter().enumerate() {
            let rho = f * f;
            if rho == 0.0 {
                continue;
            }
            let z = (lo + i as i64) as f64 / p as f64 * self.spacing;
            num.add(potential.eval(z)? * rho);
            norm.add(rho);
        }
        Ok(num.total() / norm.total())
    }
}

/// Extra phase (𝒰_{n+m_R r} − 𝒰_{n−m_R r})τ/ħ of atoms starting on site n,
/// so that φ̃_n = φ + the returned value.
pub fn short_range_phase(
    potential: &ShortRangePotential,
    n: i64,
    params: &ProtocolParams,
    lattice: &LatticeConfig<f64>,
) -> Result<f64> {
    short_range_phase_with(&PotentialMoments::new(lattice)?, potential, n, params)
}

/// [`short_range_phase`] reusing precomputed orbitals across sites.
pub fn short_range_phase_with(
    moments: &PotentialMoments,
    potential: &ShortRangePotential,
    n: i64,
    params: &ProtocolParams,
) -> Result<f64> {
    let k = i64::from(params.pulse_pairs) * i64::from(params.transfer_sites);
    let up = moments.moment(potential, n + k)?;
    let down = moments.moment(potential, n - k)?;
    Ok((up - down) * params.interrogation / HBAR)
}

/// Δg/g = ξ/(φ_g√N)·√(τ/T).
pub fn sensitivity(atoms: usize, xi2: f64, params: &ProtocolParams, lattice: &LatticeConfig<f64>) -> Result<f64> {
    params.validate()?;
    if atoms == 0 {
        return Err(Error::domain("atom number must be positive"));
    }
    if !(xi2 > 0.0) || !xi2.is_finite() {
        return Err(Error::domain("ξ² must be positive"));
    }
    let phase = params.phase_scale(lattice);
    if phase == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(xi2.sqrt() / (phase * (atoms as f64).sqrt()) * (params.interrogation / params.averaging).sqrt())
}

/// Δg/g curves against atom number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// ξ² = e/N.
    Ideal,
    /// P_f = 1/2, d fixed at the flip-branch default.
    FlipHalf,
    /// P_f = 0, d optimised at every N.
    NoFlip,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Ideal, Scenario::FlipHalf, Scenario::NoFlip];

    pub fn label(self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::FlipHalf => "pf_half",
            Self::NoFlip => "pf_zero",
        }
    }

    /// How d = Γ_z/χ is chosen, for output metadata.
    pub fn dephasing_rule(self) -> &'static str {
        match self {
            Self::Ideal => "none",
            Self::FlipHalf => "fixed d = 0.3",
            Self::NoFlip => "optimised per N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub atoms: usize,
    pub xi2: f64,
    pub sensitivity: f64,
}

/// Δg/g against N for one scenario at cooperativity C′.
pub fn sensitivity_curve(
    atoms: &[usize],
    scenario: Scenario,
    cooperativity: f64,
    route: Route,
    params: &ProtocolParams,
    lattice: &LatticeConfig<f64>,
) -> Result<Vec<SensitivityPoint>> {
    sensitivity_curve_parallel(atoms, scenario, cooperativity, route, params, lattice, 1)
}

/// [`sensitivity_curve`] split over up to `threads` scoped workers. Rows keep
/// the order of `atoms`, so the output does not depend on `threads`.
pub fn sensitivity_curve_parallel(
    atoms: &[usize],
    scenario: Scenario,
    cooperativity: f64,
    route: Route,
    params: &ProtocolParams,
    lattice: &LatticeConfig<f64>,
    threads: usize,
) -> Result<Vec<SensitivityPoint>> {
    let point = |n: usize| -> Result<SensitivityPoint> {
        let xi2 = match scenario {
            Scenario::Ideal => std::f64::consts::E / n as f64,
            Scenario::FlipHalf => optimize_gain(n, cooperativity, 0.5, None, route)?.xi2,
            Scenario::NoFlip => optimize_gain(n, cooperativity, 0.0, None, route)?.xi2,
        };
        Ok(SensitivityPoint {
            atoms: n,
            xi2,
            sensitivity: sensitivity(n, xi2, params, lattice)?,
        })
    };
    let threads = threads.clamp(1, atoms.len().max(1));
    if threads == 1 {
        return atoms.iter().map(|&n| point(n)).collect();
    }
    let chunk = atoms.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = atoms
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(|&n| point(n)).collect::<Result<Vec<_>>>()))
            .collect();
        let mut out = Vec::with_capacity(atoms.len());
        for h in handles {
            out.extend(h.join().expect("sensitivity worker panicked")?);
        }
        Ok(out)
    })
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::domain("slope needs at least two positive points"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Ok(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::RB87;

    fn rb() -> LatticeConfig<f64> {
        LatticeConfig::preset(&RB87, 6.0)
    }

    fn headline() -> ProtocolParams {
        ProtocolParams::new(&rb(), 5, 2, 1.0).unwrap()
    }

    #[test]
    fn gravity_frequency_value() {
        let p = headline();
        let lat = rb();
        let wg = p.gravity_frequency(&lat);
        let direct = 2.0 * lat.species.mass * lat.gravity * 266e-9 * 10.0 / HBAR;
        assert!((wg - direct).abs() < 1e-12 * direct);
        assert!((wg - 7.1e4).abs() < 0.1e4, "{wg}");
        let none = ProtocolParams { pulse_pairs: 0, ..p };
        assert_eq!(none.phase_scale(&lat), 0.0);
        assert!(ProtocolParams::new(&lat, 0, 2, 1.0).is_err());
    }

    #[test]
    fn unit_systems_agree() {
        // ω_g from recoil units: (Mga_l/E_R)(E_R/ħ)·2rm_R with E_R/ħ = ħk_l²/2M.
        let lat = rb();
        let p = headline();
        let k = lat.lattice_wavenumber();
        let er_over_hbar = HBAR * k * k / (2.0 * lat.species.mass);
        let recoil = lat.stark_ratio() * er_over_hbar * 20.0;
        let si = p.gravity_frequency(&lat);
        assert!((recoil - si).abs() < 1e-12 * si);
        let xi2 = 0.01;
        let s_si = sensitivity(50_000, xi2, &p, &lat).unwrap();
        let s_recoil = xi2.sqrt() / (recoil * p.interrogation * 50_000f64.sqrt()) * (p.interrogation / p.averaging).sqrt();
        assert!((s_si - s_recoil).abs() < 1e-12 * s_si);
    }

    #[test]
    fn accumulated_phase_conventions() {
        let lat = rb();
        let p = headline();
        let g0 = lat.gravity;
        assert_eq!(accumulated_phase(&p, &lat, g0, false), 0.0);
        assert!(accumulated_phase(&p, &lat, g0, true).abs() < 1e-9);
        let g = g0 * (1.0 + 1e-9);
        let phi = accumulated_phase(&p, &lat, g, false);
        assert!((phi - p.phase_scale(&lat) * (g - g0) / g0).abs() < 1e-18);
        assert!((phi - 7.1e-5).abs() < 0.1e-5);
        // The clock route subtracts frequencies of order 1e4 rad/s.
        let with_clock = accumulated_phase(&p, &lat, g, true);
        assert!((with_clock - phi).abs() < 1e-6 * phi.abs());
        let doubled = ProtocolParams { pulse_pairs: 4, ..p.clone() };
        assert!((accumulated_phase(&doubled, &lat, g, false) - 2.0 * phi).abs() < 1e-15);
        let detuned = ProtocolParams { microwave_frequency: 1.0, ..p };
        assert!((accumulated_phase(&detuned, &lat, g0, true) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn compound_pulse_transfers() {
        let mut l = SpinSiteLedger::new(5, &[(Spin::Up, 0), (Spin::Down, 0)]).unwrap();
        l.apply_sequence(&[Pulse::Transfer, Pulse::Transfer]);
        assert_eq!(l.components(0)[0].0, (Spin::Up, 10));
        assert_eq!(l.components(1)[0].0, (Spin::Down, -10));
        let mut s = SpinSiteLedger::new(5, &[(Spin::Down, 0)]).unwrap();
        s.apply(Pulse::CarrierX(std::f64::consts::FRAC_PI_2));
        s.apply_sequence(&[Pulse::Transfer, Pulse::Transfer]);
        assert_eq!(s.spin_separation(0), Some(20));
        let metres = 20.0 * rb().lattice_spacing();
        assert!((metres - 5.32e-6).abs() < 1e-12);
    }

    #[test]
    fn transfer_then_inverse_is_identity() {
        let start = SpinSiteLedger::new(3, &[(Spin::Up, 4), (Spin::Down, -2)]).unwrap();
        let mut l = start.clone();
        l.apply_sequence(&[Pulse::Transfer, Pulse::TransferInverse]);
        assert_eq!(l.distance(&start), 0.0);
        let mut zero = SpinSiteLedger::new(3, &[(Spin::Up, 0)]).unwrap();
        zero.apply(Pulse::CarrierX(std::f64::consts::FRAC_PI_2));
        zero.apply_sequence(&interferometer_sequence(0, 0.0)[1..]);
        assert_eq!(zero.spin_separation(0), None);
    }

    #[test]
    fn sequence_is_a_y_rotation() {
        // R̃_x^{−π/2}(ℛ†)^m R_z^φ ℛ^m R̃_x^{π/2} = e^{−iφS^y} on every input.
        for phi in [0.0, 0.3, -1.1, 2.5] {
            for start in [Spin::Up, Spin::Down] {
                let mut a = SpinSiteLedger::new(5, &[(start, 7)]).unwrap();
                a.apply_sequence(&interferometer_sequence(2, phi));
                let mut b = SpinSiteLedger::new(5, &[(start, 7)]).unwrap();
                b.apply(Pulse::CarrierY(phi));
                assert!(a.distance(&b) < 1e-14, "φ={phi}");
            }
        }
    }

    #[test]
    fn ledger_unitarity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let start = SpinSiteLedger::new(4, &[(Spin::Up, 0), (Spin::Down, 3)]).unwrap();
            let mut l = start.clone();
            let seq: Vec<Pulse> = (0..12)
                .map(|_| match rng.gen_range(0..5) {
                    0 => Pulse::Transfer,
                    1 => Pulse::TransferInverse,
                    2 => Pulse::PhaseZ(rng.gen_range(-3.0..3.0)),
                    3 => Pulse::CarrierX(rng.gen_range(-3.0..3.0)),
                    _ => Pulse::CarrierY(rng.gen_range(-3.0..3.0)),
                })
                .collect();
            l.apply_sequence(&seq);
            l.undo_all();
            assert!(l.distance(&start) < 1e-13);
            assert_eq!(l.history().len(), 24);
        }
    }

    #[test]
    fn pulse_parsing() {
        let seq = parse_pulses("Rx:1.5, R R Rz:0.25 Rdag,Rdag Ry:-1").unwrap();
        assert_eq!(seq.len(), 7);
        assert_eq!(seq[2], Pulse::Transfer);
        assert_eq!(seq[3], Pulse::PhaseZ(0.25));
        for p in &seq {
            assert_eq!(&p.to_string().parse::<Pulse>().unwrap(), p);
        }
        assert!(matches!(parse_pulses("R Q"), Err(Error::Domain(_))));
        assert!("Rz:nan".parse::<Pulse>().is_err());
    }

    #[test]
    fn potential_table_parsing() {
        let t = ShortRangePotential::parse_table("# z U\n0 1\n1e-6, 3\n\n2e-6 7 # end\n").unwrap();
        assert!((t.eval(0.5e-6).unwrap() - 2.0).abs() < 1e-15);
        assert!((t.eval(2e-6).unwrap() - 7.0).abs() < 1e-15);
        assert!(t.eval(3e-6).is_err());
        assert!(ShortRangePotential::parse_table("0 1\n0 2\n").is_err());
        assert!(ShortRangePotential::parse_table("0 1 2\n").is_err());
    }

    #[test]
    fn constant_potential_gives_no_phase() {
        let lat = rb();
        let flat = ShortRangePotential::Function(Box::new(|_| 3e-30));
        for n in [-3, 0, 12] {
            assert!(short_range_phase(&flat, n, &headline(), &lat).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn linear_potential_matches_gravity_response() {
        let lat = rb();
        let p = headline();
        let dg = 1e-9 * lat.gravity;
        let mass = lat.species.mass;
        let lin = ShortRangePotential::Function(Box::new(move |z| mass * dg * z));
        let expect = p.phase_scale(&lat) * 1e-9;
        let moments = PotentialMoments::new(&lat).unwrap();
        for n in [-5, 0, 9] {
            let got = short_range_phase_with(&moments, &lin, n, &p).unwrap();
            assert!((got - expect).abs() < 1e-9 * expect, "n={n}: {got} vs {expect}");
        }
    }

    #[test]
    fn yukawa_potential_dephases_across_sites() {
        let lat = rb();
        let p = headline();
        let lambda = 2e-6;
        let yuk = ShortRangePotential::Function(Box::new(move |z: f64| 1e-32 * (-(z + 20e-6) / lambda).exp()));
        let moments = PotentialMoments::new(&lat).unwrap();
        let phases: Vec<f64> = (0..5).map(|n| short_range_phase_with(&moments, &yuk, n, &p).unwrap()).collect();
        for w in phases.windows(2) {
            assert!(w[1].abs() < w[0].abs() && w[1] != 0.0);
        }
        let table = ShortRangePotential::table(vec![0.0, 1e-6], vec![0.0, 1.0]).unwrap();
        assert!(short_range_phase(&table, 0, &p, &lat).is_err());
    }

    #[test]
    fn sensitivity_formula() {
        let lat = rb();
        let p = headline();
        let sql = sensitivity(10_000, 1.0, &p, &lat).unwrap();
        assert!((sql * 100.0 * p.phase_scale(&lat) - 1.0).abs() < 1e-12);
        let quad = sensitivity(40_000, 1.0, &p, &lat).unwrap();
        assert!((quad - sql / 2.0).abs() < 1e-15 * sql);
        assert!(sensitivity(10, 0.0, &p, &lat).is_err());
        let none = ProtocolParams { pulse_pairs: 0, ..p };
        assert!(sensitivity(10, 1.0, &none, &lat).unwrap().is_infinite());
    }

    #[test]
    fn headline_sensitivity() {
        let lat = rb();
        let xi2 = optimize_gain(50_000, 2.0, 0.5, None, Route::Exact).unwrap().xi2;
        let s = sensitivity(50_000, xi2, &headline(), &lat).unwrap();
        assert!((s - 6e-9).abs() < 0.3 * 6e-9, "{s}");
    }

    #[test]
    fn curves_are_ordered_and_scale() {
        let lat = rb();
        let p = headline();
        let grid: Vec<usize> = (0..=6).map(|k| (1e3 * 10f64.powf(k as f64 / 2.0)).round() as usize).collect();
        let curve = |s| sensitivity_curve(&grid, s, 2.0, Route::Exact, &p, &lat).unwrap();
        let (ideal, half, zero) = (curve(Scenario::Ideal), curve(Scenario::FlipHalf), curve(Scenario::NoFlip));
        for i in 0..grid.len() {
            assert!(half[i].sensitivity > zero[i].sensitivity && zero[i].sensitivity > ideal[i].sensitivity);
        }
        let x: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
        let slope = |c: &[SensitivityPoint]| log_log_slope(&x, &c.iter().map(|p| p.sensitivity).collect::<Vec<_>>()).unwrap();
        assert!((slope(&ideal) + 1.0).abs() < 1e-12);
        assert!((slope(&half) + 0.75).abs() < 0.02, "{}", slope(&half));
        let threaded = sensitivity_curve_parallel(&grid, Scenario::NoFlip, 2.0, Route::Exact, &p, &lat, 3).unwrap();
        assert_eq!(threaded, zero);
    }

    #[test]
    fn no_flip_curve_approaches_heisenberg_scaling() {
        let lat = rb();
        let p = headline();
        let grid = [100_000usize, 300_000, 1_000_000];
        let x: Vec<f64> = grid.iter().map(|&n| n as f64).collect();
        for route in [Route::Exact, Route::Approximate] {
            let c = sensitivity_curve(&grid, Scenario::NoFlip, 2.0, route, &p, &lat).unwrap();
            let y: Vec<f64> = c.iter().map(|q| q.sensitivity).collect();
            let slope = log_log_slope(&x, &y).unwrap();
            assert!((slope + 1.0).abs() < 0.03, "{route:?}: {slope}");
        }
    }
}
