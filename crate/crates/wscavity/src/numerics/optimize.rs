//! One-dimensional root bracketing and minimisation.

use crate::{Error, Real, Result};

/// Bisection on a sign change. `f(a)` and `f(b)` must differ in sign.
pub fn bisect<T, F>(mut f: F, mut a: T, mut b: T, xtol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::domain("bisection interval does not bracket a root"));
    }
    for _ in 0..300 {
        let m = (a + b) / T::lit(2.0);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == T::zero() {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::numeric("bisection", (b - a).abs().lossy_f64()))
}

/// All sign changes of `f` on a grid, each refined by bisection.
pub fn bracketed_roots<T, F>(mut f: F, grid: &[T], xtol: T) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        values.push(f(x)?);
    }
    let mut roots = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == T::zero() {
            roots.push(grid[i]);
        } else if fa.signum() != fb.signum() && fb != T::zero() {
            roots.push(bisect(&mut f, grid[i], grid[i + 1], xtol)?);
        }
    }
    if let (Some(&last), Some(&x)) = (values.last(), grid.last()) {
        if last == T::zero() && grid.len() > 1 {
            roots.push(x);
        }
    }
    Ok(roots)
}

/// Location and value of a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub argument: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search on [a, b] for a unimodal function.
pub fn golden_section<T, F>(mut f: F, mut a: T, mut b: T, xtol: T) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while (b - a).abs() > xtol {
        if evaluations > 500 {
            return Err(Error::numeric("golden section", (b - a).abs().lossy_f64()));
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (argument, value) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(Minimum {
        argument,
        value,
        evaluations,
    })
}

/// Minimum of a function of a positive variable, searched in log space.
/// Starting at `x0`, the bracket is expanded geometrically downhill until the
/// function rises on both sides, then refined by golden section to a relative
/// width `rtol`.
pub fn minimize_positive<T, F>(mut f: F, x0: T, rtol: T) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(x0 > T::zero()) {
        return Err(Error::domain("starting point must be positive"));
    }
    let mut g = |u: T| f(u.exp());
    let u0 = x0.ln();
    let mut step = T::lit(0.5);
    let mut lo = u0 - step;
    let mut mid = u0;
    let mut hi = u0 + step;
    let (mut flo, mut fmid, mut fhi) = (g(lo)?, g(mid)?, g(hi)?);
    let mut expansions = 0;
    while !(fmid <= flo && fmid <= fhi) {
        expansions += 1;
        if expansions > 200 {
            return Err(Error::numeric(
                "minimum bracket expansion",
                mid.exp().lossy_f64(),
            ));
        }
        step *= T::lit(1.6);
        if flo < fhi {
            hi = mid;
            fhi = fmid;
            mid = lo;
            fmid = flo;
            lo = mid - step;
            flo = g(lo)?;
        } else {
            lo = mid;
            flo = fmid;
            mid = hi;
            fmid = fhi;
            hi = mid + step;
            fhi = g(hi)?;
        }
    }
    let m = golden_section(&mut g, lo, hi, rtol)?;
    Ok(Minimum {
        argument: m.argument.exp(),
        value: m.value,
        evaluations: m.evaluations + expansions + 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x: f64| Ok(x * x + 1.0), 0.0, 2.0, 1e-14).is_err());
    }

    #[test]
    fn bracketed_roots_of_sine() {
        let grid: Vec<f64> = (0..=100).map(|i| 0.1 + i as f64 * 0.1).collect();
        let r = bracketed_roots(|x: f64| Ok(x.sin()), &grid, 1e-13).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[2] - 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn golden_and_log_minimisers() {
        let m = golden_section(|x: f64| Ok((x - 0.3).powi(2)), -1.0, 2.0, 1e-10).unwrap();
        assert!((m.argument - 0.3).abs() < 1e-9);
        // x + 1/x has its minimum at x = 1; start far away on both sides.
        for x0 in [1e-4, 1e5] {
            let m = minimize_positive(|x: f64| Ok(x + 1.0 / x), x0, 1e-10).unwrap();
            assert!((m.argument - 1.0).abs() < 1e-6);
            assert!((m.value - 2.0).abs() < 1e-12);
        }
    }
}
