//! Ground band of the sinusoidal lattice in a truncated plane-wave basis.
//!
//! For quasimomentum q̃ (units of ħk_l) and depth v0 (units of E_R) the
//! Hamiltonian in the basis e^{i(q̃+2j)k_l z}, j = -L..L, is the real
//! symmetric tridiagonal matrix with diagonal (q̃+2j)² and off-diagonal −v0/4,
//! plus the constant v0/2. Its lowest eigenvalue without the constant is the
//! Mathieu characteristic value f(q̃, v0/4).

use crate::{Error, Real, Result};

pub const DEFAULT_CUTOFF: usize = 32;
const MAX_CUTOFF: usize = 1024;
pub const MAX_DEPTH: f64 = 50.0;

/// Truncation of the reciprocal-lattice sum: 2L+1 plane waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaneWaveBasis {
    pub cutoff: usize,
}

impl Default for PlaneWaveBasis {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

impl PlaneWaveBasis {
    pub fn dimension(&self) -> usize {
        2 * self.cutoff + 1
    }

    fn diagonal<T: Real>(&self, q: T) -> Vec<T> {
        let l = self.cutoff as i64;
        (-l..=l)
            .map(|j| {
                let k = q + T::lit(2.0) * T::int(j);
                k * k
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count).
    fn count_below<T: Real>(diag: &[T], off: T, x: T) -> usize {
        let off2 = off * off;
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut d = T::one();
        for (i, &a) in diag.iter().enumerate() {
            d = if i == 0 { a - x } else { a - x - off2 / d };
            if d == T::zero() {
                d = -tiny;
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Ground eigenpair at fixed truncation.
    pub fn ground_state<T: Real>(&self, q: T, v0: T) -> Result<BandState<T>> {
        validate(q, v0)?;
        let diag = self.diagonal(q);
        let off = -v0 / T::lit(4.0);
        let amin = diag.iter().copied().fold(T::infinity(), T::min);
        let spread = off.abs() + off.abs();
        let mut lo = amin - spread - T::epsilon();
        let mut hi = amin + spread + T::epsilon() * (T::one() + amin.abs());
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if Self::count_below(&diag, off, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= T::lit(2.0) * T::epsilon() * (T::one() + hi.abs()) {
                break;
            }
        }
        let lambda = (lo + hi) / T::lit(2.0);
        let coefficients = inverse_iteration(&diag, off, lambda);
        Ok(BandState {
            quasimomentum: q,
            depth: v0,
            cutoff: self.cutoff,
            characteristic: lambda,
            coefficients,
        })
    }
}

fn validate<T: Real>(q: T, v0: T) -> Result<()> {
    if !q.is_finite() || q.abs() > T::one() + T::lit(1e-12) {
        return Err(Error::domain(format!("quasimomentum {q} outside [-1, 1]")));
    }
    if !v0.is_finite() || v0 < T::zero() || v0 > T::lit(MAX_DEPTH) {
        return Err(Error::domain(format!(
            "lattice depth {v0} outside [0, {MAX_DEPTH}]"
        )));
    }
    Ok(())
}

/// Eigenvector for the eigenvalue `lambda` by shifted inverse iteration.
/// The shift sits just below the ground eigenvalue so the shifted matrix is
/// positive definite and the unpivoted LDLᵀ solve is stable.
fn inverse_iteration<T: Real>(diag: &[T], off: T, lambda: T) -> Vec<T> {
    let n = diag.len();
    let shift = lambda - T::lit(1e3) * T::epsilon() * (T::one() + lambda.abs());
    let mut d = vec![T::zero(); n];
    let mut l = vec![T::zero(); n];
    d[0] = diag[0] - shift;
    for i in 1..n {
        l[i] = off / d[i - 1];
        d[i] = diag[i] - shift - l[i] * off;
    }
    let mut x = vec![T::one(); n];
    for _ in 0..3 {
        for i in 1..n {
            let prev = x[i - 1];
            x[i] -= l[i] * prev;
        }
        for i in 0..n {
            x[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= l[i + 1] * next;
        }
        let norm = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    if x.iter().copied().sum::<T>() < T::zero() {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
    x
}

/// Ground-band eigenpair; coefficients index j = -L..L, gauge Σ c_j > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BandState<T> {
    pub quasimomentum: T,
    pub depth: T,
    pub cutoff: usize,
    /// f(q̃, v0/4), the eigenvalue without the constant v0/2.
    pub characteristic: T,
    pub coefficients: Vec<T>,
}

impl<T: Real> BandState<T> {
    /// E(q)/E_R.
    pub fn energy(&self) -> T {
        self.characteristic + self.depth / T::lit(2.0)
    }

    /// Coefficient of the plane wave e^{i(q̃+2j)k_l z}.
    pub fn coefficient(&self, j: i64) -> T {
        let idx = j + self.cutoff as i64;
        if idx < 0 || idx as usize >= self.coefficients.len() {
            T::zero()
        } else {
            self.coefficients[idx as usize]
        }
    }

    /// ∂f/∂v0 by Hellmann-Feynman: ⟨ψ|∂H/∂v0|ψ⟩ with off-diagonal −1/4.
    pub fn characteristic_dv0(&self) -> T {
        let s: T = self
            .coefficients
            .windows(2)
            .map(|w| w[0] * w[1])
            .sum();
        -s / T::lit(2.0)
    }

    /// ⟨sin²(k_l z)⟩ in this Bloch state.
    pub fn sin2_expectation(&self) -> T {
        T::lit(0.5) + self.characteristic_dv0()
    }
}

/// Ground eigenpair with the cutoff doubled until |E_L − E_{L+4}| is below
/// 1e-10 E_R (or a few ulps in single precision).
pub fn ground_band<T: Real>(q: T, v0: T) -> Result<BandState<T>> {
    let tol = T::lit(1e-10).max(T::lit(1e3) * T::epsilon());
    let mut cutoff = DEFAULT_CUTOFF;
    loop {
        let basis = PlaneWaveBasis { cutoff };
        let state = basis.ground_state(q, v0)?;
        let check = PlaneWaveBasis { cutoff: cutoff + 4 }.ground_state(q, v0)?;
        let residual = (state.characteristic - check.characteristic).abs();
        if residual < tol {
            return Ok(state);
        }
        cutoff *= 2;
        if cutoff > MAX_CUTOFF {
            return Err(Error::numeric(
                "plane-wave band solver",
                residual.lossy_f64(),
            ));
        }
    }
}

/// Ground-band energy E(q)/E_R = f(q̃, v0/4) + v0/2.
pub fn band_energy<T: Real>(q: T, v0: T) -> Result<T> {
    ground_band(q, v0).map(|s| s.energy())
}

/// ∂f(q̃, v0/4)/∂v0 at fixed q̃, from the ground eigenvector.
pub fn band_energy_dv0<T: Real>(q: T, v0: T) -> Result<T> {
    ground_band(q, v0).map(|s| s.characteristic_dv0())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn free_particle() {
        assert!((band_energy::<f64>(0.5, 0.0).unwrap() - 0.25).abs() < 1e-14);
        assert!((band_energy::<f64>(1.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((band_energy_dv0::<f64>(0.3, 0.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(band_energy::<f64>(1.5, 1.0).is_err());
        assert!(band_energy::<f64>(0.0, -1.0).is_err());
        assert!(band_energy::<f64>(0.0, 60.0).is_err());
    }

    #[test]
    fn cutoff_converged() {
        for &v0 in &[0.5f64, 6.0, 20.0] {
            let a = PlaneWaveBasis { cutoff: 16 }.ground_state(0.3, v0).unwrap();
            let b = PlaneWaveBasis { cutoff: 20 }.ground_state(0.3, v0).unwrap();
            assert!((a.energy() - b.energy()).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvector_residual() {
        let s = ground_band(0.37, 6.0).unwrap();
        let l = s.cutoff as i64;
        for j in -l..=l {
            let k = 0.37 + 2.0 * j as f64;
            let hv = k * k * s.coefficient(j)
                - 1.5 * (s.coefficient(j - 1) + s.coefficient(j + 1));
            assert!((hv - s.characteristic * s.coefficient(j)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let e32: f32 = band_energy(0.2f32, 6.0f32).unwrap();
        let e64 = band_energy(0.2f64, 6.0f64).unwrap();
        assert!((e32 as f64 - e64).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn dv0_matches_finite_difference(q in -1.0f64..1.0, v0 in 0.5f64..20.0) {
            let h = 1e-5;
            let fd = (ground_band(q, v0 + h).unwrap().characteristic
                - ground_band(q, v0 - h).unwrap().characteristic) / (2.0 * h);
            let hf = band_energy_dv0(q, v0).unwrap();
            prop_assert!((fd - hf).abs() < 1e-6, "fd={} hf={}", fd, hf);
        }

        #[test]
        fn sin2_is_a_probability_and_band_is_even(q in 0.0f64..1.0, v0 in 0.0f64..50.0) {
            let s = ground_band(q, v0).unwrap();
            let m = ground_band(-q, v0).unwrap();
            prop_assert!(s.sin2_expectation() >= -1e-12 && s.sin2_expectation() <= 1.0 + 1e-12);
            prop_assert!((s.energy() - m.energy()).abs() < 1e-12);
            prop_assert!((s.characteristic_dv0() - m.characteristic_dv0()).abs() < 1e-10);
        }

        #[test]
        fn band_rises_towards_the_edge(q in 0.0f64..0.99, v0 in 0.5f64..20.0) {
            let a = band_energy(q, v0).unwrap();
            let b = band_energy(q + 0.01, v0).unwrap();
            prop_assert!(b > a);
        }
    }
}
