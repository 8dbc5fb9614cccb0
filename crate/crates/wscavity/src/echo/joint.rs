//! Cavity loss and spontaneous emission together, parametrised by the
//! cooperativity C′ = χ²/(Γ_zΓ), the flip probability P_f = γ_r/Γ and the
//! ratio d = Γ_z/χ.

use super::{check_atoms, dephasing_xi2, Route};
use crate::numerics::minimize_positive;
use crate::{Error, Real, Result};

/// d used by the flip branch when none is given. The optimum is flat in d
/// between (4P_f/3C′N)^{1/4} and 1.
pub const DEFAULT_FLIP_BRANCH_RATIO: f64 = 0.3;

/// Optimiser tolerance in log-argument space.
const LOG_TOL: f64 = 1e-7;

/// Optimal ξ² with the location found numerically and the closed-form
/// predictions alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainOptimum<T> {
    pub xi2: T,
    pub chi_t0: T,
    pub d: T,
    pub analytic_xi2: T,
    pub analytic_chi_t0: T,
    pub analytic_d: T,
    pub evaluations: usize,
}

/// Rates per unit t₀ implied by (C′, P_f, d) at twisting angle χt₀:
/// (Γ_z t₀, γ_r t₀, γ_z t₀).
fn rates_times_t0<T: Real>(cooperativity: T, flip: T, d: T, chi_t0: T) -> (T, T, T) {
    // C′ = χ²/(Γ_zΓ) with Γ_z = dχ gives Γ = χ/(dC′).
    let total = chi_t0 / (d * cooperativity);
    (
        d * chi_t0,
        flip * total,
        T::lit(2.0) * (T::one() - flip) * total,
    )
}

/// Joint ξ² as a function of (N, C′, P_f, d, χt₀).
///
/// `Approximate` evaluates the leading-order expressions: for P_f > 0,
/// (1+2NΓ_z t₀)/(Nχt₀)² + (8/3)γ_r t₀; for P_f = 0,
/// (1+(2NΓ_z+3γ_z)t₀)/(Nχt₀)² + 1/N + ½(χt₀)². `Exact` replaces the
/// collective part by the exact dephasing echo and adds the single-atom
/// terms (8γ_r + 3γ_z)t₀/(Nχt₀)² + (8/3)γ_r t₀ to it.
pub fn joint_xi2<T: Real>(
    atoms: usize,
    cooperativity: T,
    flip: T,
    d: T,
    chi_t0: T,
    route: Route,
) -> Result<T> {
    check_atoms(atoms)?;
    if !(cooperativity > T::zero()) || !(d > T::zero()) {
        return Err(Error::domain("C′ and d must be positive"));
    }
    if !(T::zero()..=T::one()).contains(&flip) {
        return Err(Error::domain("flip probability outside [0, 1]"));
    }
    if !(chi_t0 > T::zero()) {
        return Ok(T::infinity());
    }
    let n = T::count(atoms);
    let (gz_coll, gr, gz) = rates_times_t0(cooperativity, flip, d, chi_t0);
    let nchi2 = (n * chi_t0).powi(2);
    match route {
        Route::Approximate if flip > T::zero() => {
            Ok((T::one() + T::lit(2.0) * n * gz_coll) / nchi2 + T::lit(8.0 / 3.0) * gr)
        }
        Route::Approximate => Ok(
            (T::one() + T::lit(2.0) * n * gz_coll + T::lit(3.0) * gz) / nchi2
                + T::one() / n
                + chi_t0 * chi_t0 / T::lit(2.0),
        ),
        Route::Exact => {
            let collective = dephasing_xi2(atoms, T::one(), d, chi_t0, Route::Exact)?;
            Ok(collective
                + (T::lit(8.0) * gr + T::lit(3.0) * gz) / nchi2
                + T::lit(8.0 / 3.0) * gr)
        }
    }
}

/// d minimising 2NΓ_z + 3γ_z at fixed χ and C′: √(3/(NC′)).
pub fn optimal_dephasing_ratio<T: Real>(atoms: usize, cooperativity: T) -> T {
    (T::lit(3.0) / (T::count(atoms) * cooperativity)).sqrt()
}

/// Minimises [`joint_xi2`] over χt₀ (golden section in log χt₀). With
/// P_f = 0 and no `fixed_d`, d is optimised as well in an outer search; with
/// P_f > 0, d defaults to [`DEFAULT_FLIP_BRANCH_RATIO`].
pub fn optimize_gain<T: Real>(
    atoms: usize,
    cooperativity: T,
    flip: T,
    fixed_d: Option<T>,
    route: Route,
) -> Result<GainOptimum<T>> {
    check_atoms(atoms)?;
    if !(cooperativity > T::zero()) {
        return Err(Error::domain("cooperativity must be positive"));
    }
    let n = T::count(atoms);
    let tol = T::lit(LOG_TOL);
    if flip > T::zero() {
        let d = fixed_d.unwrap_or(T::lit(DEFAULT_FLIP_BRANCH_RATIO));
        let analytic_chi_t0 =
            (T::lit(3.0) * cooperativity * d * d / (T::lit(4.0) * n * flip)).sqrt();
        let m = minimize_positive(
            |a| joint_xi2(atoms, cooperativity, flip, d, a, route),
            analytic_chi_t0,
            tol,
        )?;
        return Ok(GainOptimum {
            xi2: m.value,
            chi_t0: m.argument,
            d,
            analytic_xi2: (T::lit(64.0) * flip / (T::lit(3.0) * n * cooperativity)).sqrt(),
            analytic_chi_t0,
            analytic_d: d,
            evaluations: m.evaluations,
        });
    }
    let analytic_d = optimal_dephasing_ratio(atoms, cooperativity);
    let analytic_chi_t0 = (T::lit(48.0) / cooperativity).powf(T::one() / T::lit(6.0)) / n.sqrt();
    let analytic_xi2 =
        (T::one() + T::lit(3.0) * (T::lit(6.0) / cooperativity).cbrt()) / n;
    let inner = |d: T| {
        minimize_positive(
            |a| joint_xi2(atoms, cooperativity, T::zero(), d, a, route),
            analytic_chi_t0,
            tol,
        )
    };
    let (d, m, outer_evals) = match fixed_d {
        Some(d) => (d, inner(d)?, 0),
        None => {
            let mut evaluations = 0;
            let outer = minimize_positive(
                |d| {
                    let m = inner(d)?;
                    evaluations += m.evaluations;
                    Ok(m.value)
                },
                analytic_d,
                tol,
            )?;
            (outer.argument, inner(outer.argument)?, evaluations)
        }
    };
    Ok(GainOptimum {
        xi2: m.value,
        chi_t0: m.argument,
        d,
        analytic_xi2,
        analytic_chi_t0,
        analytic_d,
        evaluations: m.evaluations + outer_evals,
    })
}
