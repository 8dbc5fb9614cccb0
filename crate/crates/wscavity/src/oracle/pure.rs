//! State-vector echo under H = Σ_nm χ_nm S^z_n S^z_m.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::{Error, Real, Result};

pub const MAX_ATOMS: usize = 14;

fn check<T: Real>(chi: &DMatrix<T>) -> Result<usize> {
    let n = chi.nrows();
    if chi.ncols() != n {
        return Err(Error::domain("coupling matrix must be square"));
    }
    if n == 0 || n > MAX_ATOMS {
        return Err(Error::domain(format!("state-vector simulation supports 1..={MAX_ATOMS} atoms")));
    }
    Ok(n)
}

/// Energies Σ_nm χ_nm s_n s_m/4 of every basis state (s = ±1).
fn energies<T: Real>(chi: &DMatrix<T>, atoms: usize) -> Vec<T> {
    let sign = |a: usize, j: usize| if a & (1 << j) != 0 { T::one() } else { -T::one() };
    (0..1usize << atoms)
        .map(|a| {
            let mut e = T::zero();
            for j in 0..atoms {
                for k in 0..atoms {
                    e += chi[(j, k)] * sign(a, j) * sign(a, k);
                }
            }
            e / T::lit(4.0)
        })
        .collect()
}

fn evolve<T: Real>(psi: &mut [Complex<T>], energy: &[T], t: T) {
    for (p, e) in psi.iter_mut().zip(energy) {
        *p *= Complex::from_polar(T::one(), -*e * t);
    }
}

fn rotate_y<T: Real>(psi: &mut [Complex<T>], atoms: usize, beta: T) {
    let (s, c) = (beta / T::lit(2.0)).sin_cos();
    for j in 0..atoms {
        let bit = 1usize << j;
        for a in (0..psi.len()).filter(|a| a & bit == 0) {
            let (up, dn) = (psi[a | bit], psi[a]);
            psi[a | bit] = up * c - dn * s;
            psi[a] = up * s + dn * c;
        }
    }
}

/// S^y|ψ⟩.
fn apply_sy<T: Real>(psi: &[Complex<T>], atoms: usize) -> Vec<Complex<T>> {
    let half_i = Complex::new(T::zero(), T::lit(0.5));
    let mut out = vec![Complex::new(T::zero(), T::zero()); psi.len()];
    for j in 0..atoms {
        let bit = 1usize << j;
        for (a, o) in out.iter_mut().enumerate() {
            let x = psi[a ^ bit];
            *o += if a & bit != 0 { -half_i * x } else { half_i * x };
        }
    }
    out
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

fn coherent_x<T: Real>(atoms: usize) -> Vec<Complex<T>> {
    let dim = 1usize << atoms;
    vec![Complex::new(T::one() / T::count(dim).sqrt(), T::zero()); dim]
}

/// ⟨S^y⟩ after twist for t, rotation φ about ŷ, untwist for t.
pub fn pure_inhomogeneous_echo<T: Real>(chi: &DMatrix<T>, t: T, phi: T) -> Result<T> {
    let n = check(chi)?;
    let energy = energies(chi, n);
    let mut psi = coherent_x(n);
    evolve(&mut psi, &energy, t);
    rotate_y(&mut psi, n, phi);
    evolve(&mut psi, &energy, -t);
    Ok(inner(&psi, &apply_sy(&psi, n)).re)
}

/// ∂_φ⟨S^y⟩ at φ = 0 from the propagated tangent −iS^y|ψ(t)⟩.
pub fn pure_inhomogeneous_slope<T: Real>(chi: &DMatrix<T>, t: T) -> Result<T> {
    let n = check(chi)?;
    let energy = energies(chi, n);
    let mut psi = coherent_x(n);
    evolve(&mut psi, &energy, t);
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut tangent: Vec<_> = apply_sy(&psi, n).into_iter().map(|x| minus_i * x).collect();
    evolve(&mut psi, &energy, -t);
    evolve(&mut tangent, &energy, -t);
    Ok(T::lit(2.0) * inner(&psi, &apply_sy(&tangent, n)).re)
}
