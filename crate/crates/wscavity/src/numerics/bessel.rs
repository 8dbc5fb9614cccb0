//! Bessel functions of the first kind for integer order.

use crate::{Error, Real, Result};

pub const MAX_ORDER: i32 = 200;
pub const MAX_ARGUMENT: f64 = 1e4;

// Below this argument the ascending series loses less than a digit to
// cancellation; above it Miller's recurrence is used.
const SERIES_LIMIT: f64 = 5.0;

fn check_argument<T: Real>(x: T) -> Result<()> {
    if !x.is_finite() || x.abs() > T::lit(MAX_ARGUMENT) {
        return Err(Error::domain(format!(
            "Bessel argument {x} outside |x| <= {MAX_ARGUMENT}"
        )));
    }
    Ok(())
}

/// J_n(x) for integer order n.
pub fn bessel_j<T: Real>(n: i32, x: T) -> Result<T> {
    if n.abs() > MAX_ORDER {
        return Err(Error::domain(format!(
            "Bessel order {n} outside |n| <= {MAX_ORDER}"
        )));
    }
    check_argument(x)?;
    let order = n.unsigned_abs() as usize;
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x).
    let flip = (n < 0) != (x < T::zero());
    let value = positive_order(order, x.abs());
    Ok(if flip && order % 2 == 1 { -value } else { value })
}

/// J_0(x), ..., J_nmax(x) from one recurrence sweep.
pub fn bessel_j_range<T: Real>(nmax: usize, x: T) -> Result<Vec<T>> {
    if nmax > MAX_ORDER as usize {
        return Err(Error::domain(format!(
            "Bessel order {nmax} outside |n| <= {MAX_ORDER}"
        )));
    }
    check_argument(x)?;
    let ax = x.abs();
    let mut out = if ax < T::lit(SERIES_LIMIT) {
        (0..=nmax).map(|n| series(n, ax)).collect()
    } else {
        miller(nmax, ax)
    };
    if x < T::zero() {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(out)
}

fn positive_order<T: Real>(n: usize, x: T) -> T {
    if x == T::zero() {
        return if n == 0 { T::one() } else { T::zero() };
    }
    if x < T::lit(SERIES_LIMIT) {
        series(n, x)
    } else {
        miller(n, x)[n]
    }
}

fn series<T: Real>(n: usize, x: T) -> T {
    let half = x / T::lit(2.0);
    let mut term = T::one();
    for i in 1..=n {
        term *= half / T::count(i);
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term = -term * q / (T::count(k) * T::count(k + n));
        sum += term;
        if term.abs() <= T::epsilon() * sum.abs() || term == T::zero() || k > 200 {
            break;
        }
    }
    sum
}

/// Downward recurrence normalised by J_0 + 2 Σ J_2k = 1.
fn miller<T: Real>(nmax: usize, x: T) -> Vec<T> {
    let xf = x.lossy_f64();
    let reach = (nmax as f64).max(xf) + 30.0 + 14.0 * xf.cbrt();
    let mut start = reach.ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let big = T::max_value().sqrt();
    let mut out = vec![T::zero(); nmax + 1];
    let mut above = T::zero();
    let mut current = T::epsilon();
    let mut norm = T::zero();
    let two_over_x = T::lit(2.0) / x;
    for k in (0..=start).rev() {
        if k <= nmax {
            out[k] = current;
        }
        if k % 2 == 0 {
            norm += if k == 0 { current } else { current + current };
        }
        if k == 0 {
            break;
        }
        let below = two_over_x * T::count(k) * current - above;
        above = current;
        current = below;
        if current.abs() > big {
            let scale = big.recip();
            current *= scale;
            above *= scale;
            norm *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// The first `k` positive zeros of J_0, in increasing order.
pub fn bessel_j0_roots<T: Real>(k: usize) -> Result<Vec<T>> {
    if !(1..=20).contains(&k) {
        return Err(Error::domain(format!("requested {k} roots, need 1..=20")));
    }
    let mut roots = Vec::with_capacity(k);
    for s in 1..=k {
        let beta = (s as f64 - 0.25) * std::f64::consts::PI;
        let b8 = 8.0 * beta;
        let guess = beta + 1.0 / b8 - 124.0 / (3.0 * b8.powi(3));
        let mut x = T::lit(guess);
        let mut converged = false;
        let mut step = T::zero();
        for _ in 0..60 {
            let j0 = positive_order(0, x);
            let j1 = positive_order(1, x);
            step = j0 / j1;
            x += step;
            if step.abs() <= T::solver_tol() * x {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::numeric("J0 root refinement", step.lossy_f64()));
        }
        roots.push(x);
    }
    Ok(roots)
}
