use crate::numerics::{ground_band, periodic_trapezoid};
use crate::{Error, Real, Result};

/// Tunnelling J_{0,m}/E_R between sites m apart:
/// −½ ∫_{−1}^{1} e^{−imπq̃} f(q̃, v0/4) dq̃.
///
/// The sine part of the integrand is odd in q̃ and integrates to zero; a
/// residual above a few ulps is reported as a numeric error.
pub fn tunneling<T: Real>(v0: T, m: u32) -> Result<T> {
    if !(v0 >= T::lit(0.5) && v0 <= T::lit(50.0)) {
        return Err(Error::domain(format!("depth {v0} outside [0.5, 50]")));
    }
    if !(1..=6).contains(&m) {
        return Err(Error::domain(format!("neighbour distance {m} outside 1..=6")));
    }
    let tol = T::lit(1e-14).max(T::lit(16.0) * T::epsilon());
    let mpi = T::count(m as usize) * T::PI();
    let [re, im] = periodic_trapezoid(
        |q: T| {
            let f = ground_band(q, v0)?.characteristic;
            let a = mpi * q;
            Ok([a.cos() * f, a.sin() * f])
        },
        -T::one(),
        T::lit(2.0),
        tol,
    )?;
    let imag_tol = T::lit(1e-12).max(T::lit(1e3) * T::epsilon());
    if im.abs() > imag_tol {
        return Err(Error::numeric(
            "tunnelling integral imaginary part",
            im.lossy_f64(),
        ));
    }
    Ok(-re / T::lit(2.0))
}

/// Deep-lattice estimate (4/√π) v0^{3/4} e^{−2√v0}, in E_R.
pub fn tight_binding_tunneling<T: Real>(v0: T) -> T {
    T::lit(4.0) / T::PI().sqrt() * v0.powf(T::lit(0.75)) * (-T::lit(2.0) * v0.sqrt()).exp()
}
