//! Exact diagonalisation of one-axis twisting plus the cavity-induced
//! Wannier-Stark hopping corrections on a short tilted chain.
//!
//! Energies are in units of Mga_l with ħ = 1. Modes are (site, spin) pairs.
//! [`Statistics::HardcoreModes`] allows at most one atom per mode;
//! [`Statistics::Bosons`] allows any occupation. With
//! 𝒢⁰_↑ = 𝒢⁰_↓ and Δ_↑ = −Δ_↓ the hopping amplitude relative to η is
//! K^{nm}_σ/η = ±½𝒞J_{n−m}(X)cos((n+m)φ/2 + (n−m)π/2), so every term is fixed
//! by χ, η|α|²/Mga_l and the lattice geometry.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{DickeState, SpinMoments};
use crate::lattice::{LatticeConfig, WsLattice};
use crate::numerics::bessel_j;
use crate::{Error, Result};

const MAX_BASIS: usize = 5000;

/// Couplings of the corrected model in units of Mga_l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoppingModel {
    /// η|α|²/Mga_l.
    pub stark_shift_ratio: f64,
    /// χ/(Mga_l/ħ).
    pub chi: f64,
    /// Overlap contrast 𝒞.
    pub contrast: f64,
    /// X = (4J₀/Mga_l)sin(φ/2).
    pub bessel_argument: f64,
    /// φ = 2πλ_l/λ_c.
    pub phase: f64,
}

impl HoppingModel {
    pub fn from_lattice(cfg: &LatticeConfig<f64>, stark_shift_ratio: f64, chi: f64) -> Result<Self> {
        let lat = WsLattice::new(cfg)?;
        Ok(Self {
            stark_shift_ratio,
            chi,
            contrast: lat.contrast,
            bessel_argument: lat.bessel_argument(),
            phase: lat.phase,
        })
    }

    /// K^{nm}_↑/η.
    fn relative_hopping(&self, n: i64, m: i64) -> Result<f64> {
        let d = n - m;
        let j = bessel_j(d as i32, self.bessel_argument)?;
        let angle = (n + m) as f64 * self.phase / 2.0 + d as f64 * std::f64::consts::FRAC_PI_2;
        Ok(0.5 * self.contrast * j * angle.cos())
    }
}

/// Which terms enter the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    /// χ(S^z)² only.
    Twisting,
    /// Twisting plus tilt, single-particle hops and resonant pair hops.
    Corrected,
}

/// Occupation rule for the (site, spin) modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistics {
    /// At most one atom per mode, no exchange sign.
    #[default]
    HardcoreModes,
    /// Unrestricted bosonic occupation.
    Bosons,
}

/// Fixed-number basis and Hamiltonian of the chain.
#[derive(Debug, Clone)]
pub struct WsHoppingSystem {
    sites: usize,
    atoms: usize,
    cap: u8,
    basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    hamiltonian: DMatrix<f64>,
}

fn mode(site: usize, spin: usize) -> usize {
    2 * site + spin
}

fn spin_sign(spin: usize) -> f64 {
    if spin == 0 {
        1.0
    } else {
        -1.0
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// All occupations of `modes` modes with `atoms` atoms and at most `cap` per mode.
fn enumerate(modes: usize, atoms: usize, cap: u8) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, modes: usize, left: usize, cap: u8, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == modes {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for k in 0..=left.min(cap as usize) {
            prefix.push(k as u8);
            rec(prefix, modes, left - k, cap, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(modes), modes, atoms, cap, &mut out);
    out
}

/// c†_to c_from with its bosonic amplitude, or `None` if blocked.
fn hop(occ: &[u8], to: usize, from: usize, cap: u8) -> Option<(Vec<u8>, f64)> {
    if occ[from] == 0 {
        return None;
    }
    let mut next = occ.to_vec();
    let mut amp = f64::from(next[from]).sqrt();
    next[from] -= 1;
    if next[to] >= cap {
        return None;
    }
    amp *= f64::from(next[to] + 1).sqrt();
    next[to] += 1;
    Some((next, amp))
}

fn spin_z(occ: &[u8]) -> f64 {
    occ.chunks(2).map(|p| f64::from(p[0]) - f64::from(p[1])).sum::<f64>() / 2.0
}

impl WsHoppingSystem {
    pub fn new(
        sites: usize,
        atoms: usize,
        model: &HoppingModel,
        terms: Terms,
        statistics: Statistics,
    ) -> Result<Self> {
        let modes = 2 * sites;
        let (cap, size) = match statistics {
            Statistics::HardcoreModes => (1u8, binomial(modes, atoms.min(modes))),
            Statistics::Bosons => (u8::MAX, binomial((modes + atoms).saturating_sub(1), atoms)),
        };
        if sites == 0 || atoms > usize::from(u8::MAX) || (cap == 1 && atoms > modes) || size > MAX_BASIS {
            return Err(Error::domain(format!(
                "{atoms} atoms on {sites} sites exceed the basis limit {MAX_BASIS}"
            )));
        }
        let basis = enumerate(modes, atoms, cap);
        let index: HashMap<Vec<u8>, usize> = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let dim = basis.len();
        let mut h = DMatrix::zeros(dim, dim);
        for (col, occ) in basis.iter().enumerate() {
            let z = spin_z(occ);
            h[(col, col)] += model.chi * z * z;
        }
        if terms == Terms::Corrected {
            let k_rel: Vec<Vec<f64>> = (0..sites)
                .map(|n| {
                    (0..sites)
                        .map(|m| if n == m { Ok(0.0) } else { model.relative_hopping(n as i64, m as i64) })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            for (col, occ) in basis.iter().enumerate() {
                let tilt: f64 = occ.iter().enumerate().map(|(b, &k)| (b / 2) as f64 * f64::from(k)).sum();
                h[(col, col)] += tilt;
                for spin in 0..2 {
                    let s = spin_sign(spin);
                    for n in 0..sites {
                        for m in (0..sites).filter(|&m| m != n) {
                            let amp = s * model.stark_shift_ratio * k_rel[n][m];
                            if amp == 0.0 {
                                continue;
                            }
                            if let Some((to, a)) = hop(occ, mode(n, spin), mode(m, spin), cap) {
                                if let Some(&row) = index.get(&to) {
                                    h[(row, col)] += amp * a;
                                }
                            }
                        }
                    }
                }
                // Resonant pair hops: (n − m) + (p − q) = 0, n ≠ m, p ≠ q.
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        let sign = spin_sign(s1) * spin_sign(s2);
                        for p in 0..sites {
                            for q in (0..sites).filter(|&q| q != p) {
                                let Some((mid, a1)) = hop(occ, mode(p, s2), mode(q, s2), cap) else {
                                    continue;
                                };
                                for n in 0..sites {
                                    let m = n as i64 + p as i64 - q as i64;
                                    if m < 0 || m >= sites as i64 || m as usize == n {
                                        continue;
                                    }
                                    let m = m as usize;
                                    let amp = model.chi * sign * k_rel[n][m] * k_rel[p][q];
                                    if amp == 0.0 {
                                        continue;
                                    }
                                    if let Some((to, a2)) = hop(&mid, mode(n, s1), mode(m, s1), cap) {
                                        if let Some(&row) = index.get(&to) {
                                            h[(row, col)] += amp * a1 * a2;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let sys = Self {
            sites,
            atoms,
            cap,
            basis,
            index,
            hamiltonian: h,
        };
        sys.check_structure()?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn hamiltonian(&self) -> &DMatrix<f64> {
        &self.hamiltonian
    }

    /// Hermiticity and conservation of S^z; atom number is fixed by the basis.
    fn check_structure(&self) -> Result<()> {
        let h = &self.hamiltonian;
        let scale = h.amax().max(1.0);
        let asym = (h - h.transpose()).amax();
        if asym > 1e-14 * scale {
            return Err(Error::numeric("hopping Hamiltonian not Hermitian", asym));
        }
        for (r, a) in self.basis.iter().enumerate() {
            for (c, b) in self.basis.iter().enumerate() {
                if h[(r, c)] != 0.0 && spin_z(a) != spin_z(b) {
                    return Err(Error::numeric("hopping Hamiltonian changes S^z", h[(r, c)].abs()));
                }
            }
        }
        Ok(())
    }

    /// One atom per site, each along x̂.
    pub fn initial_state(&self) -> Result<DVector<Complex64>> {
        if self.atoms != self.sites {
            return Err(Error::domain("the initial state needs one atom per site"));
        }
        let amp = Complex64::new(0.5f64.powi(self.sites as i32).sqrt(), 0.0);
        Ok(DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|occ| {
                if occ.chunks(2).all(|p| p[0] + p[1] == 1) {
                    amp
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        ))
    }

    /// S⁺ = Σ_n c†_{n↑}c_{n↓} as a dense matrix.
    fn raising(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (c, occ) in self.basis.iter().enumerate() {
            for n in 0..self.sites {
                if let Some((to, a)) = hop(occ, mode(n, 0), mode(n, 1), self.cap) {
                    if let Some(&r) = self.index.get(&to) {
                        m[(r, c)] += a;
                    }
                }
            }
        }
        m
    }

    pub fn moments(&self, psi: &DVector<Complex64>) -> SpinMoments<f64> {
        let plus = self.raising().map(|x| Complex64::new(x, 0.0));
        let minus = plus.adjoint();
        let sx = (&plus + &minus) * Complex64::new(0.5, 0.0);
        let sy = (&plus - &minus) * Complex64::new(0.0, -0.5);
        let sz = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.basis.iter().map(|occ| Complex64::new(spin_z(occ), 0.0)),
        ));
        let ops = [sx * psi, sy * psi, sz * psi];
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        for a in 0..3 {
            mean[a] = psi.dotc(&ops[a]).re;
            for b in 0..3 {
                second[a][b] = ops[a].dotc(&ops[b]).re;
            }
        }
        SpinMoments { mean, second }
    }
}

/// Ramsey squeezing against time for the three comparison runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingTrajectory {
    pub times: Vec<f64>,
    /// χ(S^z)² alone.
    pub twisting: Vec<f64>,
    /// Twisting plus the hopping corrections.
    pub corrected: Vec<f64>,
    /// Twisting with collective dephasing Γ_z.
    pub dephased: Vec<f64>,
}

impl SqueezingTrajectory {
    /// Index of the pure-twisting optimum; the squeezing window is
    /// `times[1..=index]`.
    pub fn window_end(&self) -> usize {
        self.twisting
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Largest |ξ² − ξ²_OAT| over the window for the corrected and the
    /// dephased runs.
    pub fn max_deviations(&self) -> (f64, f64) {
        let end = self.window_end();
        let dev = |v: &[f64]| {
            (0..=end)
                .map(|i| (v[i] - self.twisting[i]).abs())
                .fold(0.0, f64::max)
        };
        (dev(&self.corrected), dev(&self.dephased))
    }
}

fn evolve_all(sys: &WsHoppingSystem, times: &[f64]) -> Result<Vec<f64>> {
    let psi0 = sys.initial_state()?;
    let eig = SymmetricEigen::new(sys.hamiltonian.clone());
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let coeff = v.adjoint() * &psi0;
    times
        .iter()
        .map(|&t| {
            let phased = DVector::from_iterator(
                coeff.len(),
                coeff.iter().zip(eig.eigenvalues.iter()).map(|(c, e)| c * Complex64::from_polar(1.0, -e * t)),
            );
            let psi = &v * phased;
            sys.moments(&psi).ramsey_squeezing(sys.atoms)
        })
        .collect()
}

/// Squeezing of `sites` atoms on `sites` sites for pure twisting, twisting
/// plus the hopping corrections, and twisting with Γ_z = `dephasing_ratio`·χ.
pub fn ws_hopping_squeezing(
    sites: usize,
    model: &HoppingModel,
    statistics: Statistics,
    dephasing_ratio: f64,
    times: &[f64],
) -> Result<SqueezingTrajectory> {
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::domain("times must be non-negative"));
    }
    let twisting = evolve_all(&WsHoppingSystem::new(sites, sites, model, Terms::Twisting, statistics)?, times)?;
    let corrected = evolve_all(&WsHoppingSystem::new(sites, sites, model, Terms::Corrected, statistics)?, times)?;
    let dephased = times
        .iter()
        .map(|&t| {
            let mut st = DickeState::coherent_x(sites)?;
            st.evolve(model.chi, dephasing_ratio * model.chi, t);
            st.moments().ramsey_squeezing(sites)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SqueezingTrajectory {
        times: times.to_vec(),
        twisting,
        corrected,
        dephased,
    })
}
