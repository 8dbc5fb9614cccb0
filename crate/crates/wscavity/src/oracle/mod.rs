//! Brute-force simulators used as ground truth for the closed forms.
//!
//! Conventions shared by every simulator: the initial state is the coherent
//! state along x̂, a y-rotation by β maps |↑⟩ → cos(β/2)|↑⟩ + sin(β/2)|↓⟩,
//! and the echo is twist for t₀, rotate by φ about ŷ, untwist for t₀.
//! Slopes in φ are obtained by propagating the exact tangent −i[S^y, ρ]
//! through the untwisting; [`central_slope`] is the finite-difference check.

mod dicke;
mod full;
mod hopping;
mod pure;

pub use dicke::{dicke_echo, dicke_echo_probe, wigner_d, DickeState};
pub use full::{lindblad_echo_probe, lindblad_full, FullState, Pulse};
pub use hopping::{ws_hopping_squeezing, HoppingModel, Statistics, SqueezingTrajectory, Terms, WsHoppingSystem};
pub use pure::{pure_inhomogeneous_echo, pure_inhomogeneous_slope};

use num_complex::Complex;

use crate::{Error, Real, Result};

/// Tolerance used by the per-step density-matrix checks.
pub const INVARIANT_TOL: f64 = 1e-9;
/// Local error target of the adaptive integrator.
pub const LINDBLAD_TOL: f64 = 1e-10;

/// Spin mean vector and symmetrised second moments ⟨{S_a, S_b}⟩/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinMoments<T> {
    pub mean: [T; 3],
    pub second: [[T; 3]; 3],
}

impl<T: Real> SpinMoments<T> {
    pub fn variance(&self, axis: usize) -> T {
        self.second[axis][axis] - self.mean[axis] * self.mean[axis]
    }

    /// Ramsey squeezing N·min_⊥ Var/|⟨S⟩|², minimised over the plane
    /// orthogonal to the mean spin.
    pub fn ramsey_squeezing(&self, atoms: usize) -> Result<T> {
        let m = self.mean;
        let len = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
        if !(len > T::zero()) {
            return Err(Error::domain("mean spin vanishes"));
        }
        let unit = [m[0] / len, m[1] / len, m[2] / len];
        // Seed with the axis least aligned with the mean.
        let pick = (0..3)
            .min_by(|&a, &b| unit[a].abs().partial_cmp(&unit[b].abs()).unwrap())
            .unwrap_or(0);
        let mut seed = [T::zero(); 3];
        seed[pick] = T::one();
        let dot = seed[0] * unit[0] + seed[1] * unit[1] + seed[2] * unit[2];
        let mut e1 = [seed[0] - dot * unit[0], seed[1] - dot * unit[1], seed[2] - dot * unit[2]];
        let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
        e1.iter_mut().for_each(|v| *v /= n1);
        let e2 = [
            unit[1] * e1[2] - unit[2] * e1[1],
            unit[2] * e1[0] - unit[0] * e1[2],
            unit[0] * e1[1] - unit[1] * e1[0],
        ];
        let cov = |a: &[T; 3], b: &[T; 3]| {
            let mut s = T::zero();
            for i in 0..3 {
                for j in 0..3 {
                    s += a[i] * b[j] * (self.second[i][j] - self.mean[i] * self.mean[j]);
                }
            }
            s
        };
        let (c11, c22, c12) = (cov(&e1, &e1), cov(&e2, &e2), cov(&e1, &e2));
        let half = T::lit(0.5);
        let min = half * (c11 + c22) - (half * (c11 - c22)).hypot(c12);
        Ok(T::count(atoms) * min / (len * len))
    }
}

/// Noise at φ = 0 and slope ∂_φ⟨S^y⟩ of one echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoProbe<T> {
    pub mean_y: T,
    pub variance_y: T,
    pub slope: T,
}

/// Central difference with a Richardson companion at half the step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference<T> {
    pub coarse: T,
    pub fine: T,
    pub extrapolated: T,
}

impl<T: Real> FiniteDifference<T> {
    /// |fine − coarse|, the size of the leading truncation term.
    pub fn richardson_gap(&self) -> T {
        (self.fine - self.coarse).abs()
    }
}

/// Default finite-difference step in φ.
pub const PHI_STEP: f64 = 1e-4;

pub fn central_slope<T: Real>(mut f: impl FnMut(T) -> Result<T>, step: T) -> Result<FiniteDifference<T>> {
    if !(step > T::zero()) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let mut diff = |h: T| -> Result<T> { Ok((f(h)? - f(-h)?) / (T::lit(2.0) * h)) };
    let coarse = diff(step)?;
    let fine = diff(step / T::lit(2.0))?;
    Ok(FiniteDifference {
        coarse,
        fine,
        extrapolated: (T::lit(4.0) * fine - coarse) / T::lit(3.0),
    })
}

/// Trace, Hermiticity and positivity of a dense row-major density matrix.
pub(crate) fn check_density<T: Real>(rho: &[Complex<T>], dim: usize, tol: f64) -> Result<()> {
    let mut trace = Complex::new(0.0, 0.0);
    let mut herm = 0.0f64;
    for a in 0..dim {
        let d = rho[a * dim + a];
        trace += Complex::new(d.re.lossy_f64(), d.im.lossy_f64());
        for b in 0..a {
            let x = rho[a * dim + b] - rho[b * dim + a].conj();
            herm = herm.max(x.norm().lossy_f64());
        }
    }
    let trace_err = (trace - 1.0).norm();
    if trace_err > tol {
        return Err(Error::numeric("density matrix trace drifted", trace_err));
    }
    if herm > tol {
        return Err(Error::numeric("density matrix lost Hermiticity", herm));
    }
    let m = nalgebra::DMatrix::<Complex<f64>>::from_fn(dim, dim, |a, b| {
        let x = rho[a * dim + b];
        Complex::new(x.re.lossy_f64(), x.im.lossy_f64())
    });
    let min = m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::numeric("density matrix lost positivity", -min));
    }
    Ok(())
}
