//! Terminating Gauss series ₂F₁(−m, −m; 1/2 − m; x).

use num_traits::{FromPrimitive, Num};

use super::summation::NeumaierSum;
use crate::{Error, Real, Result};

pub const MAX_DEGREE: u32 = 300;

/// Σ_{k=0..m} (−m)_k² / ((1/2−m)_k k!) x^k with compensated summation.
pub fn hyp2f1_neg_int<T: Real>(m: u32, x: T) -> Result<T> {
    if m > MAX_DEGREE {
        return Err(Error::domain(format!("degree {m} above {MAX_DEGREE}")));
    }
    if !x.is_finite() {
        return Err(Error::domain("non-finite argument"));
    }
    let mf = T::count(m as usize);
    let half = T::lit(0.5);
    let mut term = T::one();
    let mut acc = NeumaierSum::new();
    acc.add(term);
    for k in 0..m as usize {
        let kf = T::count(k);
        let a = kf - mf;
        term = term * a * a * x / ((kf + half - mf) * (kf + T::one()));
        if !term.is_finite() {
            return Err(Error::numeric("hypergeometric sum overflow", f64::INFINITY));
        }
        acc.add(term);
    }
    let value = acc.total();
    if !value.is_finite() {
        return Err(Error::numeric("hypergeometric sum overflow", f64::INFINITY));
    }
    Ok(value)
}

/// The same polynomial divided by its leading term T_m x^m and written in
/// powers of `w = 1/x`: Σ_j (T_{m−j}/T_m) w^j. Useful when x is large, where
/// the leading term dominates and the forward sum cancels badly.
pub fn hyp2f1_neg_int_leading_normalized<T: Real>(m: u64, w: T) -> Result<T> {
    hyp2f1_neg_int_leading_conditioned(m, w).map(|c| c.value)
}

/// Value of a cancelling sum with the ratio of its largest term to the result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioned<T> {
    pub value: T,
    pub condition: T,
}

impl<T: Real> Conditioned<T> {
    /// Relative error bound from cancellation alone.
    pub fn relative_error(&self) -> T {
        self.condition * T::epsilon()
    }
}

/// [`hyp2f1_neg_int_leading_normalized`] together with its condition number.
pub fn hyp2f1_neg_int_leading_conditioned<T: Real>(m: u64, w: T) -> Result<Conditioned<T>> {
    if !w.is_finite() {
        return Err(Error::domain("non-finite argument"));
    }
    let mf = T::lit(m as f64);
    let half = T::lit(0.5);
    let mut term = T::one();
    let mut largest = T::one();
    let mut acc = NeumaierSum::new();
    acc.add(term);
    for j in 0..m {
        let jf = T::lit(j as f64);
        let jp = jf + T::one();
        let ratio = -w * (jf + half) * (mf - jf) / (jp * jp);
        term *= ratio;
        if !term.is_finite() {
            return Err(Error::numeric("hypergeometric tail overflow", f64::INFINITY));
        }
        largest = largest.max(term.abs());
        acc.add(term);
        if ratio.abs() < half && term.abs() <= T::epsilon() * acc.total().abs() {
            break;
        }
    }
    let value = acc.total();
    Ok(Conditioned {
        value,
        condition: largest / value.abs(),
    })
}

/// Exact evaluation in any field with exact arithmetic (for example a
/// rational type). Shares the term recurrence of [`hyp2f1_neg_int`] with the
/// half-integer Pochhammer symbol cleared of denominators.
pub fn hyp2f1_neg_int_exact<Q>(m: u32, x: &Q) -> Q
where
    Q: Clone + Num + FromPrimitive,
{
    let int = |v: i64| Q::from_i64(v).expect("integer embeds in the field");
    let mi = m as i64;
    let mut term = Q::one();
    let mut sum = Q::one();
    for k in 0..mi {
        let a = k - mi;
        let num = int(2 * a * a) * x.clone();
        let den = int((2 * k + 1 - 2 * mi) * (k + 1));
        term = term * num / den;
        sum = sum + term.clone();
    }
    sum
}
