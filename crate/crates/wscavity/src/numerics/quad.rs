//! Trapezoid quadrature. For smooth periodic integrands over a full period
//! the trapezoid rule converges geometrically, which is the case for every
//! Brillouin-zone integral in this crate.

use crate::{Error, Real, Result};

/// Composite trapezoid over equally spaced samples.
pub fn trapezoid<T: Real>(samples: &[T], h: T) -> T {
    match samples.len() {
        0 | 1 => T::zero(),
        n => {
            let inner: T = samples[1..n - 1].iter().copied().sum();
            h * (inner + (samples[0] + samples[n - 1]) / T::lit(2.0))
        }
    }
}

/// ∫_a^{a+period} of a vector-valued periodic integrand. The node count is
/// doubled (reusing old nodes) until every component changes by less than
/// `tol`.
pub fn periodic_trapezoid<T, F, const K: usize>(
    mut f: F,
    a: T,
    period: T,
    tol: T,
) -> Result<[T; K]>
where
    T: Real,
    F: FnMut(T) -> Result<[T; K]>,
{
    const MAX_LEVEL: usize = 18;
    let mut n = 8usize;
    let mut sum = [T::zero(); K];
    for i in 0..n {
        let v = f(a + period * T::count(i) / T::count(n))?;
        for k in 0..K {
            sum[k] += v[k];
        }
    }
    let mut estimate = sum.map(|s| s * period / T::count(n));
    for _ in 0..MAX_LEVEL {
        for i in 0..n {
            let x = a + period * (T::count(2 * i + 1)) / T::count(2 * n);
            let v = f(x)?;
            for k in 0..K {
                sum[k] += v[k];
            }
        }
        n *= 2;
        let refined = sum.map(|s| s * period / T::count(n));
        let change = refined
            .iter()
            .zip(estimate.iter())
            .map(|(r, e)| (*r - *e).abs())
            .fold(T::zero(), T::max);
        estimate = refined;
        if change < tol {
            return Ok(estimate);
        }
    }
    Err(Error::numeric("periodic trapezoid", f64::NAN))
}
