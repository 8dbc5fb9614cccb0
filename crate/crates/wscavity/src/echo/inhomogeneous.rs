//! Lossless echo with pair-dependent twisting H = Σ_nm χ_nm S^z_n S^z_m.

use nalgebra::DMatrix;

use super::EchoResult;
use crate::numerics::NeumaierSum;
use crate::{Error, Real, Result};

const MAX_ATOMS: usize = 10_000;

/// ∂_φ⟨S^y⟩ at φ → 0:
/// ½Σ_{j<k} sin(χ_jk t)[Π_{l≠j,k} cos(χ_jl t) + Π_{l≠j,k} cos(χ_kl t)].
///
/// By symmetry this is ½Σ_j Σ_{k≠j} sin(χ_jk t)Π_{l≠j,k} cos(χ_jl t); each
/// row uses prefix and suffix products, so the cost is O(N²).
pub fn inhomogeneous_gain<T: Real>(chi: &DMatrix<T>, t: T) -> Result<T> {
    let n = chi.nrows();
    if chi.ncols() != n {
        return Err(Error::domain("coupling matrix must be square"));
    }
    if n > MAX_ATOMS {
        return Err(Error::domain(format!("at most {MAX_ATOMS} atoms")));
    }
    let scale = chi.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = T::lit(1e-12) * scale;
    for j in 0..n {
        for k in 0..j {
            if (chi[(j, k)] - chi[(k, j)]).abs() > tol {
                return Err(Error::domain("coupling matrix must be symmetric"));
            }
        }
    }
    let mut total = NeumaierSum::new();
    let mut prefix = vec![T::one(); n + 1];
    let mut suffix = vec![T::one(); n + 1];
    for j in 0..n {
        let factor = |l: usize| {
            if l == j {
                T::one()
            } else {
                (chi[(j, l)] * t).cos()
            }
        };
        for l in 0..n {
            prefix[l + 1] = prefix[l] * factor(l);
        }
        for l in (0..n).rev() {
            suffix[l] = suffix[l + 1] * factor(l);
        }
        for k in (0..n).filter(|&k| k != j) {
            total.add((chi[(j, k)] * t).sin() * prefix[k] * suffix[k + 1]);
        }
    }
    Ok(total.total() / T::lit(2.0))
}

/// Full echo figures; the noise stays at N/4 for any coupling matrix.
pub fn inhomogeneous_echo<T: Real>(chi: &DMatrix<T>, t: T) -> Result<EchoResult<T>> {
    let gain = inhomogeneous_gain(chi, t)?;
    let n = chi.nrows();
    Ok(EchoResult::from_parts(n, T::count(n) / T::lit(4.0), gain))
}
