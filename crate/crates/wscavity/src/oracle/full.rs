//! Dense 2^N density-matrix integrator for
//! ρ̇ = −i[Σ_{j<k}(χ_jk/2)σ^z_jσ^z_k, ρ] + Σ_j(γ₊D[σ⁺_j] + γ₋D[σ⁻_j] + (γ_z/4)D[σ^z_j])ρ
//! + Γ_z D[S^z]ρ. Bit j of a basis index is set when spin j is up.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::{check_density, EchoProbe, SpinMoments, INVARIANT_TOL, LINDBLAD_TOL};
use crate::cavity::DecoherenceRates;
use crate::numerics::Dopri5;
use crate::{Error, Real, Result};

pub const MAX_ATOMS: usize = 6;

/// One step of a pulse sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pulse<T> {
    /// Free evolution with the coupling matrix scaled by `sign` (±1 for the
    /// echo halves).
    Evolve { sign: T, duration: T },
    /// Instantaneous e^{−iβS^y}.
    RotateY(T),
    /// Instantaneous e^{−iβS^x}.
    RotateX(T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullState<T> {
    atoms: usize,
    rho: Vec<Complex<T>>,
}

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> FullState<T> {
    pub fn coherent_x(atoms: usize) -> Result<Self> {
        check_size(atoms)?;
        let dim = 1usize << atoms;
        let v = Complex::new(T::one() / T::count(dim), T::zero());
        Ok(Self {
            atoms,
            rho: vec![v; dim * dim],
        })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dim(&self) -> usize {
        1 << self.atoms
    }

    pub fn entry(&self, a: usize, b: usize) -> Complex<T> {
        self.rho[a * self.dim() + b]
    }

    /// ρ ← UρU† with U = ⊗_j u for the single-spin 2×2 `u` in (↑, ↓) order.
    fn apply_local(&mut self, u: [[Complex<T>; 2]; 2]) {
        let dim = self.dim();
        for j in 0..self.atoms {
            let bit = 1usize << j;
            // Rows.
            for a in (0..dim).filter(|a| a & bit == 0) {
                let (dn, up) = (a, a | bit);
                for b in 0..dim {
                    let (x_up, x_dn) = (self.rho[up * dim + b], self.rho[dn * dim + b]);
                    self.rho[up * dim + b] = u[0][0] * x_up + u[0][1] * x_dn;
                    self.rho[dn * dim + b] = u[1][0] * x_up + u[1][1] * x_dn;
                }
            }
            // Columns, with u†.
            for b in (0..dim).filter(|b| b & bit == 0) {
                let (dn, up) = (b, b | bit);
                for a in 0..dim {
                    let (x_up, x_dn) = (self.rho[a * dim + up], self.rho[a * dim + dn]);
                    self.rho[a * dim + up] = x_up * u[0][0].conj() + x_dn * u[0][1].conj();
                    self.rho[a * dim + dn] = x_up * u[1][0].conj() + x_dn * u[1][1].conj();
                }
            }
        }
    }

    pub fn rotate_y(&mut self, beta: T) {
        let (s, c) = (beta / T::lit(2.0)).sin_cos();
        let re = |x: T| Complex::new(x, T::zero());
        self.apply_local([[re(c), re(-s)], [re(s), re(c)]]);
    }

    pub fn rotate_x(&mut self, beta: T) {
        let (s, c) = (beta / T::lit(2.0)).sin_cos();
        let re = Complex::new(c, T::zero());
        let im = Complex::new(T::zero(), -s);
        self.apply_local([[re, im], [im, re]]);
    }

    /// −i[S^y, ρ].
    pub fn tangent_y(&self) -> Self {
        let dim = self.dim();
        let mut out = vec![czero(); dim * dim];
        let half_i = Complex::new(T::zero(), T::lit(0.5));
        // σ^y|↓⟩ = −i|↑⟩, σ^y|↑⟩ = i|↓⟩, so (S^y x)_a = Σ_j ±(i/2) x_{a^j}.
        for j in 0..self.atoms {
            let bit = 1usize << j;
            for a in 0..dim {
                let sign_row = if a & bit != 0 { -half_i } else { half_i };
                for b in 0..dim {
                    let sign_col = if b & bit != 0 { half_i } else { -half_i };
                    // (S^y ρ)_{ab} and (ρ S^y)_{ab} = Σ ρ_{a,c} S^y_{c,b}.
                    let left = sign_row * self.rho[(a ^ bit) * dim + b];
                    let right = sign_col * self.rho[a * dim + (b ^ bit)];
                    out[a * dim + b] += Complex::new(T::zero(), -T::one()) * (left - right);
                }
            }
        }
        Self {
            atoms: self.atoms,
            rho: out,
        }
    }

    fn plus_terms(&self) -> (Complex<T>, Complex<T>, Complex<T>, Complex<T>) {
        let dim = self.dim();
        let n = self.atoms;
        let (mut plus, mut plus2, mut plus_minus, mut plus_z) = (czero(), czero(), czero(), czero());
        for c in 0..dim {
            let mz = magnetization::<T>(c, n);
            for j in 0..n {
                let bj = 1usize << j;
                if c & bj != 0 {
                    continue;
                }
                let r = self.rho[c * dim + (c | bj)];
                plus += r;
                plus_z += r * (mz + T::lit(0.5));
                for k in 0..n {
                    let bk = 1usize << k;
                    if k == j {
                        continue;
                    }
                    if c & bk == 0 {
                        plus2 += self.rho[c * dim + (c | bj | bk)];
                    } else {
                        plus_minus += self.rho[c * dim + ((c | bj) & !bk)];
                    }
                }
            }
        }
        (plus, plus2, plus_minus, plus_z)
    }

    /// Tr(S^y ρ) without assuming unit trace.
    pub fn expect_y(&self) -> T {
        self.plus_terms().0.im
    }

    pub fn moments(&self) -> SpinMoments<T> {
        let dim = self.dim();
        let n = self.atoms;
        let (plus, plus2, plus_minus, plus_z) = self.plus_terms();
        let (mut z, mut z2) = (T::zero(), T::zero());
        for a in 0..dim {
            let p = self.rho[a * dim + a].re;
            let m = magnetization::<T>(a, n);
            z += m * p;
            z2 += m * m * p;
        }
        // ⟨S⁺S⁻ + S⁻S⁺⟩ = N + 2Σ_{j≠k}⟨σ⁺_jσ⁻_k⟩.
        let transverse = (T::count(n) + T::lit(2.0) * plus_minus.re) / T::lit(4.0);
        let half = T::lit(0.5);
        let xx = transverse + half * plus2.re;
        let yy = transverse - half * plus2.re;
        let xy = half * plus2.im;
        SpinMoments {
            mean: [plus.re, plus.im, z],
            second: [[xx, xy, plus_z.re], [xy, yy, plus_z.im], [plus_z.re, plus_z.im, z2]],
        }
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        check_density(&self.rho, self.dim(), tol)
    }
}

fn check_size(atoms: usize) -> Result<()> {
    if atoms == 0 || atoms > MAX_ATOMS {
        return Err(Error::domain(format!("full simulation supports 1..={MAX_ATOMS} atoms")));
    }
    Ok(())
}

fn magnetization<T: Real>(a: usize, atoms: usize) -> T {
    T::count(a.count_ones() as usize) - T::count(atoms) / T::lit(2.0)
}

fn spin_sign<T: Real>(a: usize, j: usize) -> T {
    if a & (1 << j) != 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Liouvillian of one free-evolution segment, applied entrywise plus jumps.
struct Generator<T> {
    atoms: usize,
    /// Coefficient multiplying ρ_ab for every non-jump term.
    diagonal: Vec<Complex<T>>,
    gamma_plus: T,
    gamma_minus: T,
}

impl<T: Real> Generator<T> {
    fn new(
        atoms: usize,
        chi: &DMatrix<T>,
        sign: T,
        rates: &DecoherenceRates<T>,
        collective: T,
    ) -> Self {
        let dim = 1usize << atoms;
        let energy: Vec<T> = (0..dim)
            .map(|a| {
                let mut e = T::zero();
                for j in 0..atoms {
                    for k in (j + 1)..atoms {
                        e += chi[(j, k)] / T::lit(2.0) * spin_sign::<T>(a, j) * spin_sign::<T>(a, k);
                    }
                }
                sign * e
            })
            .collect();
        let quarter_z = rates.gamma_z / T::lit(4.0);
        let mut diagonal = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            let ma = magnetization::<T>(a, atoms);
            for b in 0..dim {
                let mb = magnetization::<T>(b, atoms);
                let mut re = -collective / T::lit(2.0) * (ma - mb) * (ma - mb);
                for j in 0..atoms {
                    let (sa, sb) = (spin_sign::<T>(a, j), spin_sign::<T>(b, j));
                    re += quarter_z * (sa * sb - T::one());
                    // −½{σ⁻σ⁺, ρ} acts on down spins, −½{σ⁺σ⁻, ρ} on up spins.
                    let down = |s: T| if s < T::zero() { T::one() } else { T::zero() };
                    let up = |s: T| if s > T::zero() { T::one() } else { T::zero() };
                    re -= rates.gamma_plus / T::lit(2.0) * (down(sa) + down(sb));
                    re -= rates.gamma_minus / T::lit(2.0) * (up(sa) + up(sb));
                }
                diagonal.push(Complex::new(re, -(energy[a] - energy[b])));
            }
        }
        Self {
            atoms,
            diagonal,
            gamma_plus: rates.gamma_plus,
            gamma_minus: rates.gamma_minus,
        }
    }

    fn apply(&self, rho: &[Complex<T>], out: &mut [Complex<T>]) {
        let dim = 1usize << self.atoms;
        for (o, (r, d)) in out.iter_mut().zip(rho.iter().zip(&self.diagonal)) {
            *o = *r * *d;
        }
        let jumps = self.gamma_plus > T::zero() || self.gamma_minus > T::zero();
        if !jumps {
            return;
        }
        for j in 0..self.atoms {
            let bit = 1usize << j;
            for a in 0..dim {
                for b in 0..dim {
                    let (ua, ub) = (a & bit != 0, b & bit != 0);
                    if ua && ub {
                        // σ⁺ρσ⁻ fills up-up entries from down-down ones.
                        out[a * dim + b] += rho[(a ^ bit) * dim + (b ^ bit)] * self.gamma_plus;
                    } else if !ua && !ub {
                        out[a * dim + b] += rho[(a | bit) * dim + (b | bit)] * self.gamma_minus;
                    }
                }
            }
        }
    }
}

fn evolve<T: Real>(
    rho: &mut [Complex<T>],
    generator: &Generator<T>,
    duration: T,
    check_invariants: bool,
) -> Result<()> {
    if duration == T::zero() {
        return Ok(());
    }
    if !(duration > T::zero()) {
        return Err(Error::domain("segment duration must be non-negative"));
    }
    let dim = 1usize << generator.atoms;
    let ode = Dopri5::with_tolerance(T::lit(LINDBLAD_TOL));
    ode.integrate(
        |_t, y: &[Complex<T>], dy: &mut [Complex<T>]| generator.apply(y, dy),
        T::zero(),
        duration,
        rho,
        |_t, y: &[Complex<T>]| {
            if check_invariants {
                check_density(y, dim, INVARIANT_TOL)
            } else {
                Ok(())
            }
        },
    )?;
    Ok(())
}

/// Runs `sequence` from the x̂ coherent state, checking trace, Hermiticity
/// and positivity after every accepted step.
pub fn lindblad_full<T: Real>(
    atoms: usize,
    chi: &DMatrix<T>,
    rates: &DecoherenceRates<T>,
    collective: T,
    sequence: &[Pulse<T>],
) -> Result<FullState<T>> {
    check_size(atoms)?;
    check_matrix(chi, atoms)?;
    let mut state = FullState::coherent_x(atoms)?;
    for pulse in sequence {
        match *pulse {
            Pulse::Evolve { sign, duration } => {
                let g = Generator::new(atoms, chi, sign, rates, collective);
                evolve(&mut state.rho, &g, duration, true)?;
            }
            Pulse::RotateY(beta) => state.rotate_y(beta),
            Pulse::RotateX(beta) => state.rotate_x(beta),
        }
    }
    Ok(state)
}

fn check_matrix<T: Real>(chi: &DMatrix<T>, atoms: usize) -> Result<()> {
    if chi.nrows() != atoms || chi.ncols() != atoms {
        return Err(Error::domain("coupling matrix size must match the atom number"));
    }
    Ok(())
}

/// Echo noise and exact slope: twist for t₀, untwist for t₀, with the
/// tangent −i[S^y, ρ(t₀)] carried through the untwisting.
pub fn lindblad_echo_probe<T: Real>(
    atoms: usize,
    chi: &DMatrix<T>,
    rates: &DecoherenceRates<T>,
    collective: T,
    t0: T,
) -> Result<EchoProbe<T>> {
    check_size(atoms)?;
    check_matrix(chi, atoms)?;
    let mut state = FullState::coherent_x(atoms)?;
    let twist = Generator::new(atoms, chi, T::one(), rates, collective);
    evolve(&mut state.rho, &twist, t0, true)?;
    let mut tangent = state.tangent_y();
    let untwist = Generator::new(atoms, chi, -T::one(), rates, collective);
    evolve(&mut state.rho, &untwist, t0, true)?;
    evolve(&mut tangent.rho, &untwist, t0, false)?;
    let m = state.moments();
    Ok(EchoProbe {
        mean_y: m.mean[1],
        variance_y: m.variance(1),
        slope: tangent.expect_y(),
    })
}
