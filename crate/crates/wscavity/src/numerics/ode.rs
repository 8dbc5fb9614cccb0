//! Adaptive Dormand-Prince 5(4) integrator for real or complex state vectors.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::{Error, Real, Result};

/// Scalar that can populate an ODE state vector.
pub trait OdeScalar:
    Copy + Send + Sync + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<<Self as OdeScalar>::Real, Output = Self>
{
    type Real: Real;
    fn magnitude(self) -> Self::Real;
}

impl OdeScalar for f32 {
    type Real = f32;
    fn magnitude(self) -> f32 {
        self.abs()
    }
}

impl OdeScalar for f64 {
    type Real = f64;
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl<R: Real> OdeScalar for Complex<R> {
    type Real = R;
    fn magnitude(self) -> R {
        self.norm()
    }
}

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<R> {
    pub rtol: R,
    pub atol: R,
    pub initial_step: Option<R>,
    pub min_step: R,
    pub max_steps: usize,
}

impl<R: Real> Dopri5<R> {
    pub fn with_tolerance(tol: R) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            initial_step: None,
            min_step: R::epsilon() * R::lit(16.0),
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl<R: Real> Dopri5<R> {
    /// Integrates y' = rhs(t, y) from `t0` to `t1` in place. `observer` is
    /// called after every accepted step and may abort the integration.
    pub fn integrate<S, F, O>(
        &self,
        mut rhs: F,
        t0: R,
        t1: R,
        y: &mut [S],
        mut observer: O,
    ) -> Result<OdeStats>
    where
        S: OdeScalar<Real = R>,
        F: FnMut(R, &[S], &mut [S]),
        O: FnMut(R, &[S]) -> Result<()>,
    {
        let n = y.len();
        let mut stats = OdeStats::default();
        let span = t1 - t0;
        if span == R::zero() || n == 0 {
            return Ok(stats);
        }
        let direction = span.signum();
        let a: Vec<Vec<R>> = A.iter().map(|r| r.iter().map(|v| R::lit(*v)).collect()).collect();
        let c: Vec<R> = C.iter().map(|v| R::lit(*v)).collect();
        let e: Vec<R> = E.iter().map(|v| R::lit(*v)).collect();

        let mut k: Vec<Vec<S>> = vec![vec![S::zero(); n]; 7];
        let mut stage = vec![S::zero(); n];
        let mut y_new = vec![S::zero(); n];
        rhs(t0, y, &mut k[0]);

        let mut h = self
            .initial_step
            .unwrap_or_else(|| span.abs() * R::lit(1e-3))
            .abs()
            .min(span.abs());
        let mut t = t0;
        let mut err_prev = R::lit(1e-4);
        let safety = R::lit(0.9);
        let min_factor = R::lit(0.2);
        let max_factor = R::lit(5.0);

        while (t1 - t) * direction > R::zero() {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::numeric("ODE step budget exhausted", (t1 - t).lossy_f64()));
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * direction;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if a[s][j] != R::zero() {
                            acc = acc + kj[i] * (hs * a[s][j]);
                        }
                    }
                    stage[i] = acc;
                }
                let (_, rest) = k.split_at_mut(s);
                rhs(t + c[s] * hs, &stage, &mut rest[0]);
                if s == 6 {
                    y_new.copy_from_slice(&stage);
                }
            }
            let mut err_sq = R::zero();
            for i in 0..n {
                let mut diff = S::zero();
                for (j, kj) in k.iter().enumerate() {
                    if e[j] != R::zero() {
                        diff = diff + kj[i] * (hs * e[j]);
                    }
                }
                let scale = self.atol + self.rtol * y[i].magnitude().max(y_new[i].magnitude());
                let r = diff.magnitude() / scale;
                err_sq += r * r;
            }
            let err = (err_sq / R::count(n)).sqrt();
            if err <= R::one() {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&y_new);
                let (first, rest) = k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                stats.accepted += 1;
                observer(t, y)?;
                let err_safe = err.max(R::lit(1e-10));
                let factor = safety * err_safe.powf(R::lit(-0.7 / 5.0)) * err_prev.powf(R::lit(0.4 / 5.0));
                h = h * factor.max(min_factor).min(max_factor);
                err_prev = err_safe;
            } else {
                stats.rejected += 1;
                let factor = safety * err.powf(R::lit(-0.2));
                h = h * factor.max(min_factor);
            }
            if h < self.min_step * (R::one() + t.abs()) {
                return Err(Error::numeric("ODE step size underflow", h.lossy_f64()));
            }
        }
        Ok(stats)
    }
}
