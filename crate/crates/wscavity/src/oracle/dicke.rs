//! Symmetric-subspace echo under H = χ(S^z)² and collective dephasing
//! Γ_z D[S^z]. Index i counts down spins, m = S − i.

use num_complex::Complex;

use super::{check_density, EchoProbe, SpinMoments};
use crate::{Error, Real, Result};

const MAX_ATOMS: usize = 2000;

/// d^S(β) in the down-spin index, ⟨k|e^{−iβS^y}|i⟩, built by adding one
/// spin-½ at a time.
pub fn wigner_d<T: Real>(atoms: usize, beta: T) -> Result<Vec<T>> {
    if atoms > MAX_ATOMS {
        return Err(Error::domain(format!("at most {MAX_ATOMS} atoms")));
    }
    let (s, c) = (beta / T::lit(2.0)).sin_cos();
    let mut prev = vec![T::one()];
    for n in 1..=atoms {
        let dim = n + 1;
        let mut next = vec![T::zero(); dim * dim];
        let nf = T::count(n);
        let at = |k: usize, i: usize| prev[k * n + i];
        for k in 0..dim {
            for i in 0..dim {
                let mut v = T::zero();
                let (up_k, down_k) = (T::count(n - k), T::count(k));
                let (up_i, down_i) = (T::count(n - i), T::count(i));
                if k < n && i < n {
                    v += (up_k * up_i).sqrt() * c * at(k, i);
                }
                if k < n && i > 0 {
                    v -= (up_k * down_i).sqrt() * s * at(k, i - 1);
                }
                if k > 0 && i < n {
                    v += (down_k * up_i).sqrt() * s * at(k - 1, i);
                }
                if k > 0 && i > 0 {
                    v += (down_k * down_i).sqrt() * c * at(k - 1, i - 1);
                }
                next[k * dim + i] = v / nf;
            }
        }
        prev = next;
    }
    Ok(prev)
}

/// ρ_ij over the Dicke states of N spins.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState<T> {
    atoms: usize,
    rho: Vec<Complex<T>>,
}

impl<T: Real> DickeState<T> {
    /// Coherent state along x̂.
    pub fn coherent_x(atoms: usize) -> Result<Self> {
        let d = wigner_d(atoms, T::FRAC_PI_2())?;
        let dim = atoms + 1;
        let amp: Vec<T> = (0..dim).map(|k| d[k * dim]).collect();
        let rho = (0..dim * dim)
            .map(|ij| Complex::new(amp[ij / dim] * amp[ij % dim], T::zero()))
            .collect();
        Ok(Self { atoms, rho })
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn dim(&self) -> usize {
        self.atoms + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.rho[i * self.dim() + j]
    }

    fn m(&self, i: usize) -> T {
        T::count(self.atoms) / T::lit(2.0) - T::count(i)
    }

    /// Exact evolution: ρ_ij ← ρ_ij·exp{[−iχ(m_i² − m_j²) − ½Γ_z(m_i − m_j)²]t}.
    pub fn evolve(&mut self, chi: T, gamma_z: T, t: T) {
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                let (mi, mj) = (self.m(i), self.m(j));
                let decay = (-gamma_z / T::lit(2.0) * (mi - mj) * (mi - mj) * t).exp();
                let phase = -chi * (mi * mi - mj * mj) * t;
                self.rho[i * dim + j] *= Complex::from_polar(decay, phase);
            }
        }
    }

    /// ρ ← dρdᵀ with d = e^{−iβS^y}.
    pub fn rotate_y(&mut self, beta: T) -> Result<()> {
        let d = wigner_d(self.atoms, beta)?;
        self.rho = conjugate_real(&d, &self.rho, self.dim());
        Ok(())
    }

    /// −i[S^y, ρ], the φ-derivative of the rotation at φ = 0.
    pub fn tangent_y(&self) -> Self {
        let dim = self.dim();
        let zero = Complex::new(T::zero(), T::zero());
        // S^y_{i,i+1} = −i a_{i+1}/2 and S^y_{i+1,i} = i a_{i+1}/2.
        let half_i = Complex::new(T::zero(), T::lit(0.5));
        let mut out = vec![zero; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut left = zero;
                if i + 1 < dim {
                    left -= half_i * self.lowering(i + 1) * self.rho[(i + 1) * dim + j];
                }
                if i > 0 {
                    left += half_i * self.lowering(i) * self.rho[(i - 1) * dim + j];
                }
                let mut right = zero;
                if j > 0 {
                    right -= half_i * self.lowering(j) * self.rho[i * dim + j - 1];
                }
                if j + 1 < dim {
                    right += half_i * self.lowering(j + 1) * self.rho[i * dim + j + 1];
                }
                out[i * dim + j] = Complex::new(T::zero(), -T::one()) * (left - right);
            }
        }
        Self {
            atoms: self.atoms,
            rho: out,
        }
    }

    /// ⟨i−1|S⁺|i⟩.
    fn lowering(&self, i: usize) -> T {
        let s = T::count(self.atoms) / T::lit(2.0);
        let m = self.m(i);
        (s * (s + T::one()) - m * (m + T::one())).max(T::zero()).sqrt()
    }

    /// Tr(S^y ρ) without assuming unit trace.
    pub fn expect_y(&self) -> T {
        let dim = self.dim();
        let mut plus = Complex::new(T::zero(), T::zero());
        for i in 1..dim {
            plus += self.rho[i * dim + i - 1] * self.lowering(i);
        }
        plus.im
    }

    pub fn moments(&self) -> SpinMoments<T> {
        let dim = self.dim();
        let s = T::count(self.atoms) / T::lit(2.0);
        let zero = Complex::new(T::zero(), T::zero());
        let (mut plus, mut plus2, mut plus_z) = (zero, zero, zero);
        let (mut z, mut z2) = (T::zero(), T::zero());
        for i in 0..dim {
            let m = self.m(i);
            let p = self.rho[i * dim + i].re;
            z += m * p;
            z2 += m * m * p;
            if i >= 1 {
                let a = self.lowering(i);
                let r = self.rho[i * dim + i - 1];
                plus += r * a;
                plus_z += r * (a * (m + T::lit(0.5)));
            }
            if i >= 2 {
                plus2 += self.rho[i * dim + i - 2] * (self.lowering(i) * self.lowering(i - 1));
            }
        }
        let half = T::lit(0.5);
        let transverse = half * (s * (s + T::one()) - z2);
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

fn conjugate_real<T: Real>(d: &[T], rho: &[Complex<T>], dim: usize) -> Vec<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut tmp = vec![zero; dim * dim];
    for k in 0..dim {
        for i in 0..dim {
            let dk = d[k * dim + i];
            if dk == T::zero() {
                continue;
            }
            for j in 0..dim {
                tmp[k * dim + j] += rho[i * dim + j] * dk;
            }
        }
    }
    let mut out = vec![zero; dim * dim];
    for k in 0..dim {
        for l in 0..dim {
            let mut acc = zero;
            for j in 0..dim {
                acc += tmp[k * dim + j] * d[l * dim + j];
            }
            out[k * dim + l] = acc;
        }
    }
    out
}

/// (⟨S^y⟩, ⟨S^yS^y⟩) after twist χ for t₀, rotation φ, untwist for t₀, with
/// collective dephasing throughout.
pub fn dicke_echo<T: Real>(atoms: usize, chi: T, gamma_z: T, t0: T, phi: T) -> Result<(T, T)> {
    let mut st = DickeState::coherent_x(atoms)?;
    st.evolve(chi, gamma_z, t0);
    st.rotate_y(phi)?;
    st.evolve(-chi, gamma_z, t0);
    let m = st.moments();
    Ok((m.mean[1], m.second[1][1]))
}

/// Noise at φ = 0 and the exact slope ∂_φ⟨S^y⟩.
pub fn dicke_echo_probe<T: Real>(atoms: usize, chi: T, gamma_z: T, t0: T) -> Result<EchoProbe<T>> {
    let mut st = DickeState::coherent_x(atoms)?;
    st.evolve(chi, gamma_z, t0);
    let mut tangent = st.tangent_y();
    st.evolve(-chi, gamma_z, t0);
    tangent.evolve(-chi, gamma_z, t0);
    let m = st.moments();
    Ok(EchoProbe {
        mean_y: m.mean[1],
        variance_y: m.variance(1),
        slope: tangent.expect_y(),
    })
}
