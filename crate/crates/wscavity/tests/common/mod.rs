//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Lowest Bloch energy (E_R) of −d²/dz² + v0 sin²z at quasimomentum `q`
/// (units of ħk_l, z in units of 1/k_l), from a Fourier-grid Hamiltonian on
/// `points` equally spaced positions of one period.
pub fn real_space_band_energy(q: f64, v0: f64, points: usize) -> f64 {
    assert!(points % 2 == 1, "odd grid keeps the momentum set symmetric");
    let period = std::f64::consts::PI;
    let dz = period / points as f64;
    let half = (points / 2) as i64;
    let z: Vec<f64> = (0..points).map(|a| a as f64 * dz).collect();
    // Periodic part u(z) of ψ = e^{iqz}u(z): kinetic (−i∂ + q)² in the grid basis.
    let mut h = DMatrix::<Complex64>::zeros(points, points);
    for a in 0..points {
        for b in 0..points {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -half..=half {
                let k = q + 2.0 * j as f64;
                acc += Complex64::from_polar(k * k, 2.0 * j as f64 * (z[a] - z[b]));
            }
            h[(a, b)] = acc / points as f64;
        }
        h[(a, a)] += v0 * z[a].sin().powi(2);
    }
    let eig = SymmetricEigen::new(h);
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// |J_m| from the Fourier series E(q) = E₀ − 2Σ J_m cos(mπq) of the
/// real-space band over the zone q ∈ [−1, 1).
pub fn real_space_tunneling(v0: f64, m: u32, q_points: usize, grid: usize) -> f64 {
    let dq = 2.0 / q_points as f64;
    let sum: f64 = (0..q_points)
        .map(|k| {
            let q = -1.0 + k as f64 * dq;
            real_space_band_energy(q, v0, grid) * (m as f64 * std::f64::consts::PI * q).cos()
        })
        .sum();
    (0.5 * sum * dq).abs()
}

/// J₁ by its power series; adequate for |x| ≲ 10.
pub fn bessel_j1_series(x: f64) -> f64 {
    let h = x / 2.0;
    let mut term = h;
    let mut sum = term;
    for k in 1..60 {
        term *= -h * h / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Prints the acceptance line and returns `ok`. Written to the process
/// stdout directly so the line survives the harness output capture.
pub fn report(id: u32, name: &str, ok: bool, detail: &str) -> bool {
    use std::io::Write;
    let line = format!("criterion {id:>2} {} {name}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    ok
}
